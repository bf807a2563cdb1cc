#pragma once

#include <filesystem>

#include "hdx/optimizer.hpp"

namespace hdx {

// Instance files, 1-based cell and user indices:
//
//   cells: m,n,rsi_bs,omega,tier
//   links: n,m,u,p_down,p_up,i_bs2user,i_user2user
//
// A links row with n == m and u >= 1 holds user u's own powers (interference
// columns 0). With n != m it holds the interference from cell n on user u of
// cell m, or on BS m when u == 0 (then i_bs2user is I_{n,m,0} and i_user2user
// is I'_{n,m,0}; power columns 0). sigma2 and rsi_user travel as comment
// lines in the cells file.
void write_instance(const OptimizerInstance& inst, const std::filesystem::path& cells,
                    const std::filesystem::path& links);
OptimizerInstance read_instance(const std::filesystem::path& cells,
                                const std::filesystem::path& links);

/// Flat `key = value` result file: delta, objective, thresholds (dB relative
/// to 1 W, or zero / inf), trace, evaluation count.
void write_assignment(const std::filesystem::path& path, const DuplexAssignment& a,
                      const std::vector<PowerThreshold>& gamma, const char* method);

}  // namespace hdx
