#ifndef GROUPWALK_ENTROPY_HPP
#define GROUPWALK_ENTROPY_HPP

#include <map>
#include <optional>
#include <string>

#include "groupwalk/conditional.hpp"
#include "groupwalk/walk.hpp"

namespace groupwalk {

struct EntropyReport {
  std::vector<double> profile;       // H(mu_{0,n-1}) for n = 1..n_max
  std::vector<double> dropped_mass;  // cumulative ledger per term
  // Cesaro-style estimate (median of H/n over the final third) and the
  // averaged first difference over the same window; the latter is the
  // bias-robust headline value.
  double h_slope_cesaro = 0.0;
  double h_slope_first_diff = 0.0;
  double h_slope_first_diff_se = 0.0;  // spread of the window's differences
  // Intercept of the window's first differences regressed on 1/n; removes
  // the leading a/n finite-size correction and is the headline h-bar value.
  double h_slope_extrapolated = 0.0;
  double h_slope_extrapolated_se = 0.0;
  int fit_window_begin = 0;
};

struct SmbReport {
  // Raw per-path mean of -(1/n) log mu_{0,n-1}(x_n) ...
  double raw_mean = 0.0;
  double raw_se = 0.0;
  // ... and the windowed rate [log mu_{0,m-1}(x_m) - log mu_{0,n-1}(x_n)]/(n-m),
  // whose expectation is the window-averaged entropy first difference.  The
  // rate is the headline estimate of h-bar.
  double rate = 0.0;
  double rate_se = 0.0;
  // ... and the per-path two-window 1/n extrapolation of the rate, which
  // cancels the leading finite-size correction; headline h-bar estimate.
  double extrapolated = 0.0;
  double extrapolated_se = 0.0;
  int n = 0;
  int window_begin = 0;
  int inner_begin = 0;  // start of the early window used for extrapolation
  size_t paths_used = 0;
  size_t paths_excluded = 0;
};

struct HkReport {
  int k = 0;
  std::vector<double> sequence;  // H(mu_{0,n}) - H(mu_{k,n}) for n = k..n_max-1
  double final_value = 0.0;
  double tail_oscillation = 0.0;  // max |seq - final| over the last quarter
};

enum class DeltaVerdict { ToZero, ToTwo, Undecided };

struct TailReport {
  struct DeltaProfile {
    GroupElement g;
    std::vector<double> values;  // tv(g mu_{0,n}, mu_{0,n}) per n
    DeltaVerdict verdict = DeltaVerdict::Undecided;
  };
  std::vector<DeltaProfile> deltas;
  std::vector<GroupElement> subgroup_generators;  // G_n(mu) generators within the radius cap
  int detected_period = 1;
  double zero_threshold = 0.1;
  double two_threshold = 1.9;
};

struct EscapeReport {
  double l_estimate = 0.0;
  double standard_error = 0.0;
  std::vector<std::pair<int, double>> trend;  // mean |x_n|/n at checkpoints
  bool gauge_approximate = false;
  int n = 0;
  size_t paths = 0;
};

struct GrowthReport {
  std::vector<size_t> ball_sizes;  // |B_0| .. |B_t_max|
  double v_estimate = 0.0;         // log-slope over the last 3 radii
  std::optional<double> polynomial_degree;  // log-log fit when v < 0.05
};

struct InequalityVerdict {
  double h = 0.0, h_se = 0.0;
  double l = 0.0, l_se = 0.0;
  double v = 0.0;
  double slack = 0.0;  // l*v - h
  bool pass = false;
};

struct ConditionalEntropyReport {
  struct PerCylinder {
    std::vector<int32_t> prefix;
    double weight = 0.0;    // surrogate cylinder mass eps_hat(0, e)
    double estimate = 0.0;  // mean of -(1/n) log pi_n(x_n)
    double se = 0.0;
    double rate = 0.0;  // windowed variant, comparable to SmbReport::rate
    double rate_se = 0.0;
  };
  int depth = 0;
  int n = 0;
  int horizon = 0;
  int window_begin = 0;
  std::vector<PerCylinder> cylinders;
  size_t skipped_unattainable = 0;
  double weighted_mean = 0.0;
  double weighted_se = 0.0;
  double weighted_rate = 0.0;
  double weighted_rate_se = 0.0;
};

// --- operations ---

EntropyReport entropy_profile(const EnvState& start, int n_max, double prune_eps = 0.0,
                              size_t budget_atoms = kDefaultAtomBudget);

// Fills the slope fields of an existing profile (profile length >= 8).
void asymptotic_entropy_slope(EntropyReport& report);

// Quenched SMB estimate; the ensemble must have been sampled against the same
// environment realization the stream terms come from.  The three stream
// terms are the exact measures mu_{0,inner-1}, mu_{0,window-1}, mu_{0,n-1}
// with 1 <= inner < window < n; the late window gives the plain rate, the
// pair of windows gives the extrapolated estimate.
SmbReport smb_estimate(const PathEnsemble& ensemble, const SparseMeasure& term_at_inner,
                       const SparseMeasure& term_at_window, const SparseMeasure& term_at_n,
                       int inner_begin, int window_begin, int n);

HkReport h_k_estimate(const EnvState& start, int k, int n_max, double prune_eps = 0.0,
                      size_t budget_atoms = kDefaultAtomBudget);

TailReport tail_analysis(const EnvState& start, std::vector<GroupElement> test_elements,
                         int n_max, double prune_eps = 0.0,
                         size_t budget_atoms = kDefaultAtomBudget, int radius_cap = 4);

EscapeReport rate_of_escape(const PathEnsemble& ensemble);

GrowthReport growth_rate(const GroupModel& model, int t_max,
                         size_t budget_atoms = kDefaultAtomBudget);

InequalityVerdict fundamental_inequality(const SmbReport& smb, const EscapeReport& escape,
                                         const GrowthReport& growth);

// Per-cylinder SMB-style estimates of the conditional chains at the given
// depth, plus the surrogate-mass-weighted mean.  Free groups only.
ConditionalEntropyReport conditional_entropy(const EnvState& start, ModelPtr group, int depth,
                                             int n, int horizon, size_t paths_per_cylinder,
                                             uint64_t seed);

// Largest d such that a homomorphism through the abelianization mod d sees
// every step measure concentrated on a single residue class (Z_d periodicity).
int detect_period(const EnvState& start, int inspect_terms = 16, int d_cap = 64);

}  // namespace groupwalk

#endif
