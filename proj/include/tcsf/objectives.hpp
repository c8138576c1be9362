#pragma once

#include <functional>
#include <optional>
#include <string>

#include "tcsf/perturbations.hpp"
#include "tcsf/rng.hpp"

namespace tcsf {

// A test objective together with whatever closed-form structure it has.
// hess_true and third_deriv_contraction may be empty; callers that need them
// (asymptotic error analysis) fall back to finite differences.
struct ObjectiveSpec {
  std::string name;
  int dim = 0;
  std::function<double(const Vec&)> eval_true;
  std::function<Vec(const Vec&)> grad_true;
  std::function<Mat(const Vec&)> hess_true;                  // optional
  std::function<Vec(const Vec&)> third_deriv_contraction;    // optional; see t_vector()
  std::optional<double> known_min_value;
  std::optional<Vec> known_minimizer;
  std::optional<double> lipschitz_grad_L;
  Vec box_lo, box_hi;  // initialization box used by the benchmark
};

// Observation noise: f is observed as f(x) + noise, where the noise standard
// deviation may depend on x.
//  - None:  exact observations.
//  - Type1: xi_x = [x^T, 1] eta with eta ~ N(0, sigma^2 I_{d+1}); the same eta
//           realization defines the noise at every x (a field over x), so
//           observations at nearby points are correlated.
//  - Type2: N(0, ln ||x||).
//  - Type3: N(0, 1 / (1 + ln ||x||)).
//  - AdditiveFixed: N(0, sigma^2), state-independent.
// Type2/Type3 prescribe non-positive (or non-finite) variances near the
// origin; those are clamped to variance_floor and flagged as degenerate.
struct NoiseModel {
  enum class Kind { None, Type1, Type2, Type3, AdditiveFixed };

  Kind kind = Kind::None;
  double sigma = 5.0;           // Type1 / AdditiveFixed standard deviation
  double variance_floor = 1e-12;

  static NoiseModel none() { return {Kind::None, 5.0, 1e-12}; }
  static NoiseModel type1(double sigma = 5.0) { return {Kind::Type1, sigma, 1e-12}; }
  static NoiseModel type2() { return {Kind::Type2, 5.0, 1e-12}; }
  static NoiseModel type3() { return {Kind::Type3, 5.0, 1e-12}; }
  static NoiseModel additive(double sigma) { return {Kind::AdditiveFixed, sigma, 1e-12}; }

  const char* name() const {
    switch (kind) {
      case Kind::None: return "none";
      case Kind::Type1: return "type1";
      case Kind::Type2: return "type2";
      case Kind::Type3: return "type3";
      case Kind::AdditiveFixed: return "additive";
    }
    return "unknown";
  }
};

// One realization of the noise source, reusable across evaluation points.
// For Type1 this is the eta vector; for Type2/Type3 it is a standard normal
// z that is scaled by the x-dependent standard deviation.
struct NoiseDraw {
  Vec eta;      // Type1: length dim+1
  double z = 0.0;
};

// An objective paired with a noise model. observe() draws fresh noise;
// noise_at() evaluates an existing draw at a point, which is what couples
// observations when an estimator reuses one draw for both of its probes.
class NoisyObjective {
 public:
  NoisyObjective(ObjectiveSpec spec, NoiseModel noise)
      : spec_(std::move(spec)), noise_(noise) {}

  const ObjectiveSpec& spec() const { return spec_; }
  const NoiseModel& noise_model() const { return noise_; }

  NoiseDraw draw_noise(RandomStream& rng) const;

  // Noise value of a given draw at x. Sets *degenerate when a Type2/Type3
  // variance had to be clamped to the floor.
  double noise_at(const NoiseDraw& draw, const Vec& x, bool* degenerate = nullptr) const;

  // f(x) + fresh noise.
  double observe(const Vec& x, RandomStream& rng, bool* degenerate = nullptr) const;

  double eval_true(const Vec& x) const { return spec_.eval_true(x); }

 private:
  ObjectiveSpec spec_;
  NoiseModel noise_;
};

// Standard test problems.
ObjectiveSpec make_rastrigin(int dim);
ObjectiveSpec make_rosenbrock(int dim);
ObjectiveSpec make_quadratic();       // fixed 4-d quadratic 0.5 x^T A x - b^T x
ObjectiveSpec make_saddle_test();     // 2-d double well (x^2-1)^2 + y^2

// The quadratic's defining data (A symmetric positive definite, b).
Mat quadratic_A();
Vec quadratic_b();

}  // namespace tcsf
