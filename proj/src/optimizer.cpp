#include "tcsf/optimizer.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace tcsf {

namespace {

RunRecord run_impl(const NoisyObjective& obj, const EstimatorKind& kind, const Vec& x1,
                   const ScheduleConfig& sched, std::uint64_t seed, bool randomized) {
  if (sched.horizon_N < 1) throw std::invalid_argument("run: horizon_N must be >= 1");
  if (x1.size() != obj.spec().dim) throw std::invalid_argument("run: x1 dimension mismatch");
  if (!x1.allFinite()) throw std::invalid_argument("run: x1 must be finite");

  RandomStream root(seed);
  RandomStream est_rng = root.split(1);
  RandomStream reservoir_rng = root.split(2);

  RunRecord rec;
  rec.seed = seed;
  rec.thin_factor = sched.horizon_N <= 10000 ? 1 : 10;
  rec.trajectory.reserve(static_cast<size_t>(sched.horizon_N / rec.thin_factor) + 2);

  Vec x = x1;
  Vec x_reservoir = x1;
  rec.stop_reason = StopReason::HorizonReached;
  long k = 1;
  for (; k <= sched.horizon_N; ++k) {
    const double delta = sched.smoothing.at(k);
    GradientEstimate e;
    try {
      e = estimate(kind, obj, x, delta, est_rng);
    } catch (const NumericError&) {
      rec.stop_reason = StopReason::NumericError;
      break;
    }
    const double gn = e.g.norm();

    if ((k - 1) % rec.thin_factor == 0)
      rec.trajectory.push_back({k, x, obj.eval_true(x), gn});
    if (randomized && reservoir_rng.below(static_cast<std::uint64_t>(k)) == 0)
      x_reservoir = x;

    if (gn <= sched.epsilon_stop) {
      rec.stop_reason = StopReason::EpsilonReached;
      break;
    }

    x -= sched.step.at(k) * e.g;
    if (!x.allFinite()) {
      rec.stop_reason = StopReason::NumericError;
      break;
    }
  }
  rec.iterations_used = std::min(k, sched.horizon_N);
  rec.final_x = x.allFinite() ? x : Vec(Vec::Constant(x1.size(), std::nan("")));
  rec.final_f_true = x.allFinite() ? obj.eval_true(x) : std::nan("");
  if (randomized) rec.selected_x_R = x_reservoir;
  return rec;
}

}  // namespace

const char* stop_reason_name(StopReason r) {
  switch (r) {
    case StopReason::EpsilonReached: return "epsilon";
    case StopReason::HorizonReached: return "horizon";
    case StopReason::NumericError: return "numeric-error";
  }
  return "unknown";
}

Assumption1Report validate_assumption1(const ScheduleConfig& sched) {
  if (sched.step.kind != Rule::Kind::Power || sched.smoothing.kind != Rule::Kind::Power)
    throw std::invalid_argument("validate_assumption1: both rules must be Power");
  const double alpha = sched.step.exponent;
  const double phi = sched.smoothing.exponent;
  Assumption1Report r;
  r.sum_gamma_diverges = alpha <= 1.0;
  r.ratio_sq_summable = 2.0 * (alpha - phi) > 1.0;
  r.valid = r.sum_gamma_diverges && r.ratio_sq_summable;
  r.upsilon = alpha - 2.0 * phi;
  r.theorem2_admissible = phi >= alpha / 6.0 && r.upsilon > 0.0 && alpha > 0.0 && alpha <= 1.0;
  return r;
}

RunRecord run(const NoisyObjective& obj, const EstimatorKind& kind, const Vec& x1,
              const ScheduleConfig& sched, std::uint64_t seed) {
  return run_impl(obj, kind, x1, sched, seed, false);
}

RunRecord run_randomized(const NoisyObjective& obj, const EstimatorKind& kind, const Vec& x1,
                         const ScheduleConfig& sched, std::uint64_t seed) {
  return run_impl(obj, kind, x1, sched, seed, true);
}

ScheduleConfig theorem_schedule(Theorem which, long N, const TheoremConstants& constants) {
  if (N < 1) throw std::invalid_argument("theorem_schedule: N must be >= 1");
  auto need = [](const std::optional<double>& v, const char* symbol) {
    if (!v) throw std::invalid_argument(std::string("theorem_schedule: missing constant ") + symbol);
    return *v;
  };
  const double n = static_cast<double>(N);

  ScheduleConfig sched;
  sched.horizon_N = N;
  sched.epsilon_stop = 0.0;

  switch (which) {
    case Theorem::Thm3:
    case Theorem::Thm4: {
      // gamma = min{c2/L, N^{-2/3}}, delta = N^{-1/6}.
      const double c2 = need(constants.c2, "c2");
      const double l = need(constants.L, "L");
      sched.step = Rule::constant(std::min(c2 / l, std::pow(n, -2.0 / 3.0)));
      sched.smoothing = Rule::constant(std::pow(n, -1.0 / 6.0));
      break;
    }
    case Theorem::Thm5: {
      // gamma = min{1/(2 L c13), 1/(c13 sigma sqrt(N))}, delta = 1/(L sqrt(d N c13)),
      // with c12 = sqrt(d)/c2 and c13 = 4 c11 c12 / (d+1) derived when absent.
      const double l = need(constants.L, "L");
      const double sigma = need(constants.sigma, "sigma");
      double c13;
      if (constants.c13) {
        c13 = *constants.c13;
      } else {
        if (!constants.dim) throw std::invalid_argument("theorem_schedule: missing constant dim");
        const double d = *constants.dim;
        const double c12 =
            constants.c12 ? *constants.c12 : std::sqrt(d) / need(constants.c2, "c2");
        c13 = 4.0 * need(constants.c11, "c11") * c12 / (d + 1.0);
      }
      if (!constants.dim) throw std::invalid_argument("theorem_schedule: missing constant dim");
      const double d = *constants.dim;
      sched.step = Rule::constant(std::min(1.0 / (2.0 * l * c13), 1.0 / (c13 * sigma * std::sqrt(n))));
      sched.smoothing = Rule::constant(1.0 / (l * std::sqrt(d * n * c13)));
      break;
    }
    case Theorem::Thm6: {
      // gamma = min{c2/(2 c11^2 L), 1/sqrt(N)}, delta = 1/sqrt(N).
      const double c2 = need(constants.c2, "c2");
      const double c11 = need(constants.c11, "c11");
      const double l = need(constants.L, "L");
      sched.step = Rule::constant(std::min(c2 / (2.0 * c11 * c11 * l), 1.0 / std::sqrt(n)));
      sched.smoothing = Rule::constant(1.0 / std::sqrt(n));
      break;
    }
  }
  return sched;
}

}  // namespace tcsf
