#include "hdx/instance_io.hpp"

#include <cmath>
#include <fstream>
#include <string>

#include "hdx/csv.hpp"

namespace hdx {
namespace {

double comment_value(const CsvTable& t, const std::string& key) {
  const std::string prefix = "# " + key + " = ";
  for (const auto& c : t.comments) {
    if (c.rfind(prefix, 0) == 0) return parse_number(c.substr(prefix.size()));
  }
  throw IoError("instance file lacks '" + key + "'");
}

std::string threshold_text(const PowerThreshold& g) {
  if (g.is_zero()) return "zero";
  if (g.is_infinite()) return "inf";
  return format_number(g.to_db());
}

}  // namespace

void write_instance(const OptimizerInstance& inst, const std::filesystem::path& cells,
                    const std::filesystem::path& links) {
  inst.validate();
  const std::size_t M = inst.cells();
  {
    CsvWriter w(cells, "hdx-instance-cells", {"m", "n", "rsi_bs", "omega", "tier"},
                {"sigma2 = " + format_number(inst.sigma2),
                 "rsi_user = " + format_number(inst.rsi_user)});
    for (std::size_t m = 0; m < M; ++m) {
      w.cell(m + 1).cell(inst.n[m]).cell(inst.rsi_bs[m]).cell(inst.omega[m]);
      w.cell(number(inst.tier[m])).end_row();
    }
    w.close();
  }
  CsvWriter w(links, "hdx-instance-links",
              {"n", "m", "u", "p_down", "p_up", "i_bs2user", "i_user2user"});
  for (std::size_t m = 0; m < M; ++m) {
    for (std::size_t u = 0; u < inst.n[m]; ++u) {
      w.cell(m + 1).cell(m + 1).cell(u + 1).cell(inst.p_down[m][u]).cell(inst.p_up[m][u]);
      w.cell(0.0).cell(0.0).end_row();
    }
  }
  for (std::size_t n = 0; n < M; ++n) {
    for (std::size_t m = 0; m < M; ++m) {
      if (n == m) continue;
      w.cell(n + 1).cell(m + 1).cell(0).cell(0.0).cell(0.0);
      w.cell(inst.i_bs2bs[n][m]).cell(inst.i_user2bs[n][m]).end_row();
      for (std::size_t u = 0; u < inst.n[m]; ++u) {
        w.cell(n + 1).cell(m + 1).cell(u + 1).cell(0.0).cell(0.0);
        w.cell(inst.i_bs2user[n][m][u]).cell(inst.i_user2user[n][m][u]).end_row();
      }
    }
  }
  w.close();
}

OptimizerInstance read_instance(const std::filesystem::path& cells,
                                const std::filesystem::path& links) {
  const CsvTable ct = read_csv(cells);
  const CsvTable lt = read_csv(links);
  OptimizerInstance inst;
  const std::size_t M = ct.rows.size();
  inst.sigma2 = comment_value(ct, "sigma2");
  inst.rsi_user = comment_value(ct, "rsi_user");
  inst.n.resize(M);
  inst.tier.resize(M);
  inst.rsi_bs.resize(M);
  inst.omega.resize(M);
  auto index = [&](double v, std::size_t limit, const char* what) {
    if (!(v >= 1.0) || v > static_cast<double>(limit) || v != std::floor(v))
      throw IoError(std::string("bad ") + what + " index " + format_number(v));
    return static_cast<std::size_t>(v) - 1;
  };
  try {
    for (std::size_t r = 0; r < M; ++r) {
      const std::size_t m = index(ct.number(r, "m"), M, "cell");
      inst.n[m] = static_cast<std::size_t>(ct.number(r, "n"));
      inst.rsi_bs[m] = ct.number(r, "rsi_bs");
      inst.omega[m] = ct.number(r, "omega");
      inst.tier[m] = ct.number(r, "tier") == 1.0 ? Tier::One : Tier::Two;
    }
    inst.p_down.resize(M);
    inst.p_up.resize(M);
    inst.i_bs2user.assign(M, std::vector<std::vector<double>>(M));
    inst.i_user2user.assign(M, std::vector<std::vector<double>>(M));
    inst.i_bs2bs.assign(M, std::vector<double>(M, 0.0));
    inst.i_user2bs.assign(M, std::vector<double>(M, 0.0));
    for (std::size_t m = 0; m < M; ++m) {
      inst.p_down[m].assign(inst.n[m], 0.0);
      inst.p_up[m].assign(inst.n[m], 0.0);
      for (std::size_t n = 0; n < M; ++n) {
        inst.i_bs2user[n][m].assign(inst.n[m], 0.0);
        inst.i_user2user[n][m].assign(inst.n[m], 0.0);
      }
    }
    for (std::size_t r = 0; r < lt.rows.size(); ++r) {
      const std::size_t n = index(lt.number(r, "n"), M, "cell");
      const std::size_t m = index(lt.number(r, "m"), M, "cell");
      const double uv = lt.number(r, "u");
      if (uv == 0.0) {
        if (n == m) throw IoError("links row " + std::to_string(r + 1) + ": BS row with n == m");
        inst.i_bs2bs[n][m] = lt.number(r, "i_bs2user");
        inst.i_user2bs[n][m] = lt.number(r, "i_user2user");
        continue;
      }
      const std::size_t u = index(uv, inst.n[m], "user");
      if (n == m) {
        inst.p_down[m][u] = lt.number(r, "p_down");
        inst.p_up[m][u] = lt.number(r, "p_up");
      } else {
        inst.i_bs2user[n][m][u] = lt.number(r, "i_bs2user");
        inst.i_user2user[n][m][u] = lt.number(r, "i_user2user");
      }
    }
    inst.validate();
  } catch (const std::invalid_argument& e) {
    throw IoError(std::string("malformed instance: ") + e.what());
  }
  return inst;
}

void write_assignment(const std::filesystem::path& path, const DuplexAssignment& a,
                      const std::vector<PowerThreshold>& gamma, const char* method) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  auto list = [&](const char* key, const auto& v, auto fmt) {
    out << key << " =";
    for (const auto& x : v) out << ' ' << fmt(x);
    out << '\n';
  };
  out << "# schema: hdx-assignment v" << kCsvSchemaVersion << '\n';
  out << "method = " << method << '\n';
  list("delta", a.delta, [](std::size_t d) { return std::to_string(d); });
  out << "objective = " << format_number(a.objective) << '\n';
  list("gamma_db", gamma, threshold_text);
  list("trace", a.trace, [](double v) { return format_number(v); });
  out << "evaluations = " << a.evaluations << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace hdx
