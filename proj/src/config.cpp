#include "hdx/config.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace hdx {
namespace {

constexpr std::array<std::string_view, 12> kKeys{
    "lambda1_per_km2", "lambda2_per_km2", "lambda_u_per_km2", "p1_dbm",
    "p2_dbm",          "pu_dbm",          "alpha",            "beta_db",
    "gamma1_db",       "gamma2_db",       "bandwidth_hz",     "noise_dbm_hz"};

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_number(std::string_view v, std::size_t line_no) {
  double out = 0.0;
  // from_chars rejects a leading '+', which people do write in config files.
  if (!v.empty() && v.front() == '+') v.remove_prefix(1);
  const auto* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc{} || ptr != end || std::isnan(out)) {
    throw ConfigError("line " + std::to_string(line_no) + ": bad number '" + std::string(v) + "'");
  }
  return out;
}

void apply(NetworkParams& p, std::string_view key, double v) {
  if (key == "lambda1_per_km2") p.bs_density[0] = v * kPerKm2;
  else if (key == "lambda2_per_km2") p.bs_density[1] = v * kPerKm2;
  else if (key == "lambda_u_per_km2") p.user_density = v * kPerKm2;
  else if (key == "p1_dbm") p.bs_power[0] = dbm_to_watts(v);
  else if (key == "p2_dbm") p.bs_power[1] = dbm_to_watts(v);
  else if (key == "pu_dbm") p.user_power = dbm_to_watts(v);
  else if (key == "alpha") p.alpha = v;
  else if (key == "beta_db") p.rsi_ratio = v == -kInf ? 0.0 : db_to_linear(v);
  else if (key == "gamma1_db") p.gamma[0] = PowerThreshold::from_db(v);
  else if (key == "gamma2_db") p.gamma[1] = PowerThreshold::from_db(v);
  else if (key == "bandwidth_hz") p.bandwidth_hz = v;
  else if (key == "noise_dbm_hz") p.noise_dbm_hz = v;
}

std::string fmt_num(double v) {
  if (v == kInf) return "inf";
  if (v == -kInf) return "-inf";
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

}  // namespace

NetworkParams parse_config(std::string_view text) {
  return parse_config(text, NetworkParams::defaults());
}

NetworkParams parse_config(std::string_view text, NetworkParams p) {
  std::set<std::string, std::less<>> seen;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;

    if (const auto c = line.find_first_of("#;"); c != std::string_view::npos) {
      line = line.substr(0, c);
    }
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError("line " + std::to_string(line_no) + ": unterminated section header");
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));
    bool known = false;
    for (auto k : kKeys) known = known || k == key;
    if (!known) {
      throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" + std::string(key) + "'");
    }
    if (!seen.emplace(key).second) {
      throw ConfigError("line " + std::to_string(line_no) + ": duplicate key '" + std::string(key) + "'");
    }
    apply(p, key, parse_number(value, line_no));
  }
  try {
    p.validate();
  } catch (const ParamError& e) {
    throw ConfigError(std::string("invalid parameters: ") + e.what());
  }
  return p;
}

NetworkParams load_config(const std::filesystem::path& path) {
  return load_config(path, NetworkParams::defaults());
}

NetworkParams load_config(const std::filesystem::path& path, const NetworkParams& base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), base);
}

std::string to_config_text(const NetworkParams& p) {
  std::ostringstream out;
  out << "[network]\n"
      << "lambda1_per_km2 = " << fmt_num(p.bs_density[0] / kPerKm2) << '\n'
      << "lambda2_per_km2 = " << fmt_num(p.bs_density[1] / kPerKm2) << '\n'
      << "lambda_u_per_km2 = " << fmt_num(p.user_density / kPerKm2) << '\n'
      << "p1_dbm = " << fmt_num(watts_to_dbm(p.bs_power[0])) << '\n'
      << "p2_dbm = " << fmt_num(watts_to_dbm(p.bs_power[1])) << '\n'
      << "pu_dbm = " << fmt_num(watts_to_dbm(p.user_power)) << '\n'
      << "alpha = " << fmt_num(p.alpha) << '\n'
      << "beta_db = " << fmt_num(p.rsi_ratio == 0.0 ? -kInf : linear_to_db(p.rsi_ratio)) << '\n'
      << "\n[switching]\n"
      << "gamma1_db = " << fmt_num(p.gamma[0].to_db()) << '\n'
      << "gamma2_db = " << fmt_num(p.gamma[1].to_db()) << '\n'
      << "\n[radio]\n"
      << "bandwidth_hz = " << fmt_num(p.bandwidth_hz) << '\n'
      << "noise_dbm_hz = " << fmt_num(p.noise_dbm_hz) << '\n';
  return out.str();
}

}  // namespace hdx
