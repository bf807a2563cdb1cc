#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include "hdx/params.hpp"

namespace hdx {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses `key = value` lines into a parameter set, starting from
/// NetworkParams::defaults(). `[section]` headers group keys and are otherwise
/// ignored; `#` and `;` start comments. Recognized keys:
///
///   lambda1_per_km2 lambda2_per_km2 lambda_u_per_km2 p1_dbm p2_dbm pu_dbm
///   alpha beta_db gamma1_db gamma2_db bandwidth_hz noise_dbm_hz
///
/// Threshold and beta values accept `inf` / `-inf`. Unknown keys, duplicate
/// keys and malformed numbers raise ConfigError with the offending line.
NetworkParams parse_config(std::string_view text);
NetworkParams load_config(const std::filesystem::path& path);
/// Same, with keys absent from the text keeping their value in `base`.
NetworkParams parse_config(std::string_view text, NetworkParams base);
NetworkParams load_config(const std::filesystem::path& path, const NetworkParams& base);

/// Inverse of parse_config: every key, boundary units.
std::string to_config_text(const NetworkParams& p);

}  // namespace hdx
