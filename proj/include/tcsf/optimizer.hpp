#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "tcsf/estimators.hpp"

namespace tcsf {

// Step-size / smoothing-radius rule: gamma_k = value / k^exponent (k >= 1),
// or a constant. Power schedules index from k = 1.
struct Rule {
  enum class Kind { Power, Constant };

  Kind kind = Kind::Constant;
  double value = 0.0;     // gamma0 / delta0, or the constant itself
  double exponent = 0.0;  // Power only

  static Rule power(double value0, double exponent) { return {Kind::Power, value0, exponent}; }
  static Rule constant(double v) { return {Kind::Constant, v, 0.0}; }

  double at(long k) const {
    return kind == Kind::Power ? value / std::pow(static_cast<double>(k), exponent) : value;
  }
};

struct ScheduleConfig {
  Rule step;       // gamma_k
  Rule smoothing;  // delta_k
  long horizon_N = 1000;
  double epsilon_stop = 1e-4;

  // k^{-0.6} steps with k^{-0.09} smoothing, the benchmark's diminishing setting.
  static ScheduleConfig diminishing(long N) {
    return {Rule::power(1.0, 0.6), Rule::power(1.0, 0.09), N, 1e-4};
  }
  // Constant steps 1e-4 with constant smoothing 1e-3, the benchmark's other setting.
  static ScheduleConfig constant(long N, double gamma = 1e-4, double delta = 1e-3) {
    return {Rule::constant(gamma), Rule::constant(delta), N, 1e-4};
  }
};

// Summability diagnostics for Power/Power schedules gamma_k = gamma0/k^alpha,
// delta_k = delta0/k^phi.
struct Assumption1Report {
  bool sum_gamma_diverges = false;   // alpha <= 1
  bool ratio_sq_summable = false;    // 2(alpha - phi) > 1
  bool valid = false;                // both of the above
  bool theorem2_admissible = false;  // phi >= alpha/6 and alpha - 2 phi > 0
  double upsilon = 0.0;              // alpha - 2 phi
};

// Exponent algebra only; throws std::invalid_argument unless both rules are Power.
Assumption1Report validate_assumption1(const ScheduleConfig& sched);

enum class StopReason { EpsilonReached, HorizonReached, NumericError };

const char* stop_reason_name(StopReason r);

struct TrajectoryPoint {
  long k = 0;
  Vec x;
  double f_true = 0.0;
  double g_norm = 0.0;
};

struct RunRecord {
  std::vector<TrajectoryPoint> trajectory;  // thinned; see thin_factor
  int thin_factor = 1;
  StopReason stop_reason = StopReason::HorizonReached;
  long iterations_used = 0;
  Vec final_x;
  double final_f_true = 0.0;
  std::optional<Vec> selected_x_R;
  std::uint64_t seed = 0;
};

// Stochastic-gradient descent x_{k+1} = x_k - gamma_k g_k with g_k from the
// estimator; stops early when ||g_k|| <= epsilon_stop, always capped at
// horizon_N iterations. True function values are recorded noise-free.
RunRecord run(const NoisyObjective& obj, const EstimatorKind& kind, const Vec& x1,
              const ScheduleConfig& sched, std::uint64_t seed);

// As run(), additionally selecting an iterate x_R uniformly at random from
// the iterates the run actually visited (reservoir over k = 1..iterations).
RunRecord run_randomized(const NoisyObjective& obj, const EstimatorKind& kind, const Vec& x1,
                         const ScheduleConfig& sched, std::uint64_t seed);

enum class Theorem { Thm3, Thm4, Thm5, Thm6 };

// Problem constants a theorem schedule may need. Absent required entries
// raise std::invalid_argument naming the missing symbol. c12/c13 are derived
// from c2/c11/dim when not supplied directly.
struct TheoremConstants {
  std::optional<double> L;      // gradient Lipschitz constant
  std::optional<double> sigma;  // observation-noise scale
  std::optional<double> c2;
  std::optional<double> c11;
  std::optional<double> c12;
  std::optional<double> c13;
  std::optional<double> B;      // gradient bound (unused by the implemented schedules)
  std::optional<int> dim;
};

// The constant step/smoothing pair each convergence theorem prescribes for a
// horizon of N iterations; epsilon_stop is 0 (no early stopping).
ScheduleConfig theorem_schedule(Theorem which, long N, const TheoremConstants& constants);

}  // namespace tcsf
