#pragma once

#include <stdexcept>
#include <string>

#include "tcsf/objectives.hpp"
#include "tcsf/perturbations.hpp"
#include "tcsf/rng.hpp"

namespace tcsf {

// How the two function observations of one gradient estimate share noise.
//  - Fresh:  independent noise per observation (the generic oracle model).
//  - Shared: one noise realization evaluated at both probe points. For Type1
//    this is the natural reading of a state-dependent linear noise field and
//    is what the benchmark uses by default; for Type2/Type3 it reuses the
//    underlying standard normal.
enum class NoiseCoupling { Fresh, Shared };

// A zeroth-order gradient estimator. Every variant consumes exactly two
// function observations per estimate.
struct EstimatorKind {
  enum class Variant { TcsfOneSided, TcsfBalanced, TcsfCrn, Gsf, Spsa, RdsaUniform };

  Variant variant = Variant::TcsfOneSided;
  PerturbationKind perturbation = PerturbationKind::truncated_cauchy_exact();
  double rdsa_eta = 5.0;          // RdsaUniform: perturbations uniform on [-eta, eta]
  bool rescale_by_c2 = false;     // TCSF family: divide by c2 to undo the scale bias
  NoiseCoupling coupling = NoiseCoupling::Fresh;

  static EstimatorKind tcsf() { return {Variant::TcsfOneSided, PerturbationKind::truncated_cauchy_exact(), 5.0, false, NoiseCoupling::Fresh}; }
  static EstimatorKind tcsf_balanced() { return {Variant::TcsfBalanced, PerturbationKind::truncated_cauchy_exact(), 5.0, false, NoiseCoupling::Fresh}; }
  static EstimatorKind tcsf_crn() { return {Variant::TcsfCrn, PerturbationKind::truncated_cauchy_exact(), 5.0, false, NoiseCoupling::Shared}; }
  static EstimatorKind gsf() { return {Variant::Gsf, PerturbationKind::gaussian(), 5.0, false, NoiseCoupling::Fresh}; }
  static EstimatorKind spsa() { return {Variant::Spsa, PerturbationKind::rademacher(), 5.0, false, NoiseCoupling::Fresh}; }
  static EstimatorKind rdsa(double eta = 5.0) { return {Variant::RdsaUniform, PerturbationKind::uniform_interval(-eta, eta), eta, false, NoiseCoupling::Fresh}; }

  std::string name() const;
  bool is_tcsf_family() const {
    return variant == Variant::TcsfOneSided || variant == Variant::TcsfBalanced ||
           variant == Variant::TcsfCrn;
  }
};

// One gradient estimate with its bookkeeping.
struct GradientEstimate {
  Vec g;
  PerturbationSample u;
  double y_plus = 0.0;            // observation at x + delta*u
  double y_minus_or_center = 0.0;  // observation at x (one-sided) or x - delta*u (balanced)
  double delta = 0.0;
};

// Thrown when an estimate or run hits a non-finite value.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Compute one two-observation gradient estimate at x with smoothing radius
// delta. Draw order is fixed (perturbation first, then noise) so that equal
// seeds give equal estimates across variants sharing a perturbation kind.
// Throws std::invalid_argument if delta <= 0, NumericError if any observation
// or output component is non-finite.
GradientEstimate estimate(const EstimatorKind& kind, const NoisyObjective& obj, const Vec& x,
                          double delta, RandomStream& rng);

struct McGradient {
  Vec mean;
  Vec se;
  long n = 0;
};

// Monte Carlo mean (with componentwise standard errors) of the one-sided
// truncated-Cauchy estimator at fixed x and delta. Requires n >= 1e3.
McGradient smoothed_gradient_mc(const NoisyObjective& obj, const Vec& x, double delta, long n,
                                RandomStream& rng);

}  // namespace tcsf
