#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>

#include "tcsf/rng.hpp"

namespace tcsf {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Perturbation distribution used by a gradient estimator. All kinds are
// dimension-agnostic; UniformInterval carries its support bounds.
struct PerturbationKind {
  enum class Tag { TruncatedCauchyExact, TProjectedSphere, Gaussian, Rademacher, UniformInterval };

  Tag tag = Tag::TruncatedCauchyExact;
  double lo = -1.0;  // UniformInterval only
  double hi = 1.0;

  static PerturbationKind truncated_cauchy_exact() { return {Tag::TruncatedCauchyExact, -1.0, 1.0}; }
  static PerturbationKind t_projected_sphere() { return {Tag::TProjectedSphere, -1.0, 1.0}; }
  static PerturbationKind gaussian() { return {Tag::Gaussian, -1.0, 1.0}; }
  static PerturbationKind rademacher() { return {Tag::Rademacher, -1.0, 1.0}; }
  static PerturbationKind uniform_interval(double lo, double hi);

  std::string name() const;
};

struct PerturbationSample {
  Vec u;
  PerturbationKind kind;
};

// Constants of the unit-ball truncated Cauchy density that the estimator
// theory depends on. c1/c11 are quadrature-exact; c2/c_bar carry Monte Carlo
// standard errors when estimated by sampling (zero when quadrature-derived).
struct DistributionConstants {
  int dim = 0;
  double c1 = 0.0;     // normalization of the truncated density
  double c2 = 0.0;     // E[(d+1)(u^1)^2 / (1+‖u‖^2)]
  double c2_se = 0.0;
  double c_bar = 0.0;  // E‖u‖^4
  double c_bar_se = 0.0;
  double c11 = 0.0;    // 2*Gamma((d+1)/2) / (sqrt(pi)*Gamma(d/2)*c1)
  long n_samples = 0;
  std::uint64_t seed = 0;
};

// Normalization constant c1 for the given dimension, via adaptive radial
// quadrature to absolute tolerance 1e-12. Cached per dimension.
double compute_normalization(int dim);

// Density of the truncated-to-the-delta-ball Cauchy distribution at u.
// Zero outside the ball. Throws std::invalid_argument on delta <= 0 or if
// consts.dim does not match u's dimension.
double density_truncated_cauchy(const Vec& u, double delta, const DistributionConstants& consts);

// Draw one perturbation vector.
//  - TruncatedCauchyExact: rejection sampling, uniform-ball proposal,
//    acceptance probability (1+‖u‖^2)^{-(d+1)/2} (bounded below by 2^{-(d+1)/2}).
//  - TProjectedSphere: multivariate t (1 dof) scaled to unit norm; this is the
//    uniform distribution on the sphere, kept distinct because it is the
//    construction used by the original benchmark experiments.
//  - Gaussian: i.i.d. standard normal components.
//  - Rademacher: i.i.d. +-1.
//  - UniformInterval: i.i.d. uniform on [lo, hi].
PerturbationSample sample(const PerturbationKind& kind, int dim, RandomStream& rng);

// Monte Carlo estimates of c2 and c_bar (with standard errors) for any kind;
// c1/c11 are filled from quadrature for TruncatedCauchyExact and left zero
// otherwise. Throws std::invalid_argument if n_samples < 1e4.
DistributionConstants estimate_constants(const PerturbationKind& kind, int dim, long n_samples,
                                         RandomStream& rng);

// Quadrature-only constants for the exact truncated Cauchy distribution
// (all expectations reduce to 1-D radial integrals). No sampling involved.
DistributionConstants exact_constants(int dim);

// Scale constant c2 for a perturbation kind: quadrature for the exact kind,
// closed form (d+1)/(2d) for the unit sphere, Monte Carlo (cached) otherwise.
double c2_for(const PerturbationKind& kind, int dim);

struct MomentEstimate {
  double value = 0.0;
  double se = 0.0;
  long n = 0;
};

// Monte Carlo estimate of E‖u‖^{2r}.
MomentEstimate moment(const PerturbationKind& kind, int r, int dim, long n_samples, RandomStream& rng);

// Theoretical bound c11/(r+d) on E‖u‖^{2r} for the exact truncated Cauchy.
double moment_bound(int r, int dim);

}  // namespace tcsf
