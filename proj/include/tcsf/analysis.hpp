#pragma once

#include <vector>

#include "tcsf/estimators.hpp"

namespace tcsf {

// Inputs to the asymptotic mean-squared-error formula
//   AMSE = (c_bar delta0^2 gamma0 ||Phi T||)^2 + (1/delta0^2) trace(Phi P),
// with Phi = (gamma0 H - (1/2) upsilon_plus I)^{-1} and P = (sigma_prime_sq/4) I.
struct AMSEInputs {
  double gamma0 = 0.0;
  double delta0 = 0.0;
  Mat hessian_at_opt;      // H = grad^2 f(x*)
  Vec T_vector;            // per-coordinate third-derivative contraction at x*
  double sigma_prime_sq = 0.0;
  double upsilon_plus = 0.0;  // upsilon when alpha = 1, else 0
  double c_bar = 0.0;         // E||u||^4 of the perturbation
};

struct AMSEResult {
  double total = 0.0;
  double bias_part = 0.0;      // squared asymptotic-bias norm
  double variance_part = 0.0;  // trace term
};

// Throws std::invalid_argument when gamma0*lambda_min(H) <= upsilon_plus/2
// (Phi undefined) or on dimension mismatch.
AMSEResult amse(const AMSEInputs& inputs);

enum class AmseBaseline { Gsf, Spsa };

// Baseline AMSE / truncated-Cauchy AMSE, where the baseline replaces c_bar by
// its own fourth-moment constant (3 for the Gaussian marginal, 1 for
// Rademacher) in the bias part only. Always >= 1 when inputs.c_bar <= 1.
double amse_ratio(AmseBaseline baseline, const AMSEInputs& inputs);

// Bias of a gradient estimator against the scale-corrected true gradient
// c2_hat * grad f(x), probed by Monte Carlo over a decreasing delta grid.
struct BiasProbeReport {
  std::vector<double> delta_grid;
  std::vector<double> bias_norms;
  std::vector<double> bias_norm_ses;  // delta-method SE of each norm
  double fitted_slope = 0.0;          // OLS on log delta vs log bias norm
  bool degenerate = false;            // some bias norm indistinguishable from 0
  long n_samples_used = 0;
  EstimatorKind estimator;
};

// Monte Carlo bias probe at a noiseless objective. c2_hat (with its standard
// error) comes from estimate_constants; its uncertainty is folded into the
// reported SEs. n_samples doubles adaptively (up to 4x) until the smallest
// bias norm exceeds 5x its SE, or the report is flagged degenerate. Grid must
// be strictly decreasing with >= 4 points for a slope fit.
BiasProbeReport bias_probe(const EstimatorKind& kind, const NoisyObjective& obj, const Vec& x,
                           const std::vector<double>& delta_grid, long n_samples, double c2_hat,
                           double c2_hat_se, RandomStream& rng);

// Second-moment scaling probe: fits log E||G||^2 against log delta.
struct SecondMomentReport {
  std::vector<double> delta_grid;
  std::vector<double> second_moments;  // E||G||^2 at each delta
  std::vector<double> ses;
  double fitted_slope = 0.0;
  long n_samples_used = 0;
  EstimatorKind estimator;
};

SecondMomentReport second_moment_probe(const EstimatorKind& kind, const NoisyObjective& obj,
                                       const Vec& x, const std::vector<double>& delta_grid,
                                       long n_samples, RandomStream& rng);

// The per-coordinate contraction T_i = -(1/6)[f_iii + 3 sum_{j != i} f_jji]
// at x, from the objective's analytic third derivatives when present, else by
// central finite differences of the Hessian with step 1e-3.
Vec t_vector(const ObjectiveSpec& spec, const Vec& x);

}  // namespace tcsf
