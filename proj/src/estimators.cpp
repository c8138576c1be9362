#include "tcsf/estimators.hpp"

#include <cmath>

namespace tcsf {

namespace {

// TCSF weight w(u) = (d+1) u / (1 + ||u||^2).
Vec tcsf_weight(const Vec& u) {
  return Vec((u.size() + 1.0) * u / (1.0 + u.squaredNorm()));
}

void check_finite(double y) {
  if (!std::isfinite(y)) throw NumericError("non-finite function observation");
}

}  // namespace

std::string EstimatorKind::name() const {
  std::string base;
  switch (variant) {
    case Variant::TcsfOneSided: base = "tcsf"; break;
    case Variant::TcsfBalanced: base = "b-tcsf"; break;
    case Variant::TcsfCrn: base = "tcsf-crn"; break;
    case Variant::Gsf: base = "gsf"; break;
    case Variant::Spsa: base = "spsa"; break;
    case Variant::RdsaUniform: base = "rdsa"; break;
  }
  if (is_tcsf_family() && perturbation.tag == PerturbationKind::Tag::TProjectedSphere)
    base += "-sphere";
  if (rescale_by_c2) base += "-rescaled";
  return base;
}

GradientEstimate estimate(const EstimatorKind& kind, const NoisyObjective& obj, const Vec& x,
                          double delta, RandomStream& rng) {
  if (delta <= 0.0) throw std::invalid_argument("estimate: delta must be > 0");
  const int d = static_cast<int>(x.size());

  GradientEstimate out;
  out.delta = delta;
  out.u = sample(kind.perturbation, d, rng);
  const Vec& u = out.u.u;

  const bool balanced = kind.variant == EstimatorKind::Variant::TcsfBalanced ||
                        kind.variant == EstimatorKind::Variant::Spsa ||
                        kind.variant == EstimatorKind::Variant::RdsaUniform;
  const bool shared = kind.coupling == NoiseCoupling::Shared ||
                      kind.variant == EstimatorKind::Variant::TcsfCrn;

  const Vec x_plus = x + delta * u;
  const Vec x_other = balanced ? Vec(x - delta * u) : x;

  // Noise draw order is fixed: the plus-side observation's noise first.
  const NoiseDraw draw_plus = obj.draw_noise(rng);
  const NoiseDraw draw_other = shared ? draw_plus : obj.draw_noise(rng);
  out.y_plus = obj.eval_true(x_plus) + obj.noise_at(draw_plus, x_plus);
  out.y_minus_or_center = obj.eval_true(x_other) + obj.noise_at(draw_other, x_other);
  check_finite(out.y_plus);
  check_finite(out.y_minus_or_center);

  const double diff = out.y_plus - out.y_minus_or_center;
  switch (kind.variant) {
    case EstimatorKind::Variant::TcsfOneSided:
    case EstimatorKind::Variant::TcsfCrn:
      out.g = (diff / delta) * tcsf_weight(u);
      break;
    case EstimatorKind::Variant::TcsfBalanced:
      out.g = (diff / (2.0 * delta)) * tcsf_weight(u);
      break;
    case EstimatorKind::Variant::Gsf:
      out.g = (diff / delta) * u;
      break;
    case EstimatorKind::Variant::Spsa: {
      out.g.resize(d);
      for (int i = 0; i < d; ++i) out.g(i) = diff / (2.0 * delta * u(i));
      break;
    }
    case EstimatorKind::Variant::RdsaUniform: {
      const double scale = 3.0 / (kind.rdsa_eta * kind.rdsa_eta);
      out.g = scale * (diff / (2.0 * delta)) * u;
      break;
    }
  }

  if (kind.rescale_by_c2 && kind.is_tcsf_family())
    out.g /= c2_for(kind.perturbation, d);

  if (!out.g.allFinite()) throw NumericError("non-finite gradient estimate");
  return out;
}

McGradient smoothed_gradient_mc(const NoisyObjective& obj, const Vec& x, double delta, long n,
                                RandomStream& rng) {
  if (n < 1000) throw std::invalid_argument("smoothed_gradient_mc: n must be >= 1e3");
  const int d = static_cast<int>(x.size());
  Vec sum = Vec::Zero(d), sumsq = Vec::Zero(d);
  const EstimatorKind kind = EstimatorKind::tcsf();
  for (long i = 0; i < n; ++i) {
    const GradientEstimate e = estimate(kind, obj, x, delta, rng);
    sum += e.g;
    sumsq += e.g.cwiseProduct(e.g);
  }
  McGradient out;
  out.n = n;
  out.mean = sum / static_cast<double>(n);
  out.se = ((sumsq / static_cast<double>(n) - out.mean.cwiseProduct(out.mean)).cwiseMax(0.0) /
            static_cast<double>(n))
               .cwiseSqrt();
  return out;
}

}  // namespace tcsf
