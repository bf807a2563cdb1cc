#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "hdx/montecarlo.hpp"
#include "hdx/params.hpp"

namespace hdx {

/// Finite-network rate model of one layout. Cells are indexed m; user u of
/// cell m is sorted by decreasing downlink received power. Interference
/// tables are indexed [n][m][u] (from cell n to user u of cell m) and [n][m]
/// (from cell n to BS m); n == m entries are zero and never read.
struct OptimizerInstance {
  std::vector<std::size_t> n;               // users per cell (N_m >= 1)
  std::vector<Tier> tier;                   // tier of each cell's BS
  std::vector<std::vector<double>> p_down;  // P_{m,u} (W)
  std::vector<std::vector<double>> p_up;    // P_{u,m} (W)
  std::vector<std::vector<std::vector<double>>> i_bs2user;    // I_{n,m,u}
  std::vector<std::vector<double>> i_bs2bs;                   // I_{n,m,0}
  std::vector<std::vector<std::vector<double>>> i_user2user;  // I'_{n,m,u}
  std::vector<std::vector<double>> i_user2bs;                 // I'_{n,m,0}
  std::vector<double> rsi_bs;  // RSI_m (W)
  double rsi_user = 0.0;       // RSI_u (W)
  std::vector<double> omega;   // W / N_m (Hz)
  double sigma2 = 0.0;         // per-channel noise (W)

  std::size_t cells() const { return n.size(); }
  std::size_t total_users() const;
  /// Throws std::invalid_argument when shapes or invariants are off.
  void validate() const;
};

using Delta = std::vector<std::size_t>;

/// Printed: log2(P / denominator) as in the model. Shannon: log2(1 + P / den).
enum class RateForm : std::uint8_t { Printed, Shannon };

struct UserRates {
  double fd_d = 0.0;
  double fd_u = 0.0;
  double hd = 0.0;
};

/// Direct transcription of the three per-user rate expressions.
UserRates user_rates(const OptimizerInstance& inst, const Delta& delta, std::size_t m,
                     std::size_t u, RateForm form = RateForm::Printed);

/// Sum rate U (bits/s), recomputed from scratch.
double objective(const OptimizerInstance& inst, const Delta& delta,
                 RateForm form = RateForm::Printed);

/// Objective with cached interference sums; moving one cell by +-1 costs one
/// pass over the users plus one log2 per cell.
class IncrementalObjective {
 public:
  IncrementalObjective(const OptimizerInstance& inst, Delta start,
                       RateForm form = RateForm::Printed);

  double value() const;
  void set(std::size_t m, std::size_t new_delta);
  const Delta& delta() const { return delta_; }
  /// Rebuilds the cached sums to shed accumulated rounding.
  void refresh();

 private:
  const OptimizerInstance& inst_;
  RateForm form_;
  Delta delta_;
  std::vector<std::size_t> offset_;  // first global user index of each cell
  std::vector<double> frac_;         // Delta_n / N_n
  // Per user (global index) and per BS: sums over n != m of I, x_n I, I', x_n I'.
  std::vector<double> u_i, u_xi, u_ip, u_xip;
  std::vector<double> b_i, b_xi, b_ip, b_xip;
};

struct DuplexAssignment {
  Delta delta;
  double objective = 0.0;
  std::vector<double> trace;  // objective after each accepted step, starting value first
  std::size_t evaluations = 0;
};

/// Algorithm 1: +-1 neighborhood search from all-HD, best strict improvement
/// per iteration, +1 preferred when both directions tie.
DuplexAssignment greedy_select(const OptimizerInstance& inst, RateForm form = RateForm::Printed);

class BudgetExceeded : public std::runtime_error {
 public:
  BudgetExceeded(double product, double budget)
      : std::runtime_error("exhaustive search needs " + std::to_string(product) +
                           " evaluations, budget is " + std::to_string(budget)),
        product_(product) {}
  double product() const { return product_; }

 private:
  double product_;
};

/// Product of (N_m + 1): the exhaustive lattice size.
double lattice_size(const OptimizerInstance& inst);

/// Global maximizer; ties go to the lexicographically smallest delta.
DuplexAssignment exhaustive_search(const OptimizerInstance& inst, double budget = 1e6,
                                   RateForm form = RateForm::Printed);

enum class ThresholdConvention : std::uint8_t {
  AsPrinted,   // Delta = 0 -> gamma = 0, Delta = N -> gamma = inf
  Consistent,  // Delta = 0 -> gamma = inf (nobody admitted), Delta = N -> gamma = 0
};

std::vector<PowerThreshold> thresholds_from_delta(
    const OptimizerInstance& inst, const Delta& delta,
    ThresholdConvention conv = ThresholdConvention::AsPrinted);

/// Number of users per cell whose downlink power the threshold admits.
Delta classify_with_thresholds(const OptimizerInstance& inst, const std::vector<PowerThreshold>& g);

/// Builds the rate model of a snapshot: empty cells dropped, interference
/// from mean path loss, user-side interference scaled by P_u / P_n of the
/// interfering cell. `cell_bs` receives the snapshot BS index of each cell.
OptimizerInstance extract_instance(const Snapshot& s, const NetworkParams& p,
                                   std::vector<std::uint32_t>* cell_bs = nullptr,
                                   std::vector<std::vector<std::uint32_t>>* cell_members = nullptr);

enum class Scheme : std::uint8_t { Hybrid, AllHd, AllFd, MacroFdSmallHd, MacroHdSmallFd };
const char* scheme_name(Scheme s);

Delta baseline_delta(const OptimizerInstance& inst, Scheme s);

/// Random instance for property tests: cells with 1..max_users users on a
/// unit-density layout.
OptimizerInstance synthetic_instance(std::uint64_t seed, std::size_t cells, std::size_t max_users,
                                     const NetworkParams& p);
OptimizerInstance synthetic_instance(std::uint64_t seed, const std::vector<std::size_t>& users,
                                     const NetworkParams& p);

struct SchemeRates {
  std::vector<Scheme> schemes;
  std::vector<double> sum_rate;  // bits/s, mean over slots
};

/// Achieved sum rate of each delta vector under round-robin scheduling with
/// exact per-node interference and i.i.d. fading, shared across schemes.
SchemeRates simulate_schemes(const Snapshot& s, const NetworkParams& p,
                             const std::vector<std::uint32_t>& cell_bs,
                             const std::vector<std::vector<std::uint32_t>>& cell_members,
                             const std::vector<std::pair<Scheme, Delta>>& plans, int slots,
                             std::uint64_t seed);

}  // namespace hdx
