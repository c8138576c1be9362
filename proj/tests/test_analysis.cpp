#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <vector>

#include "doctest.h"
#include "tcsf/analysis.hpp"

using namespace tcsf;

namespace {

// Scalar setting solvable by hand: H = 2, gamma0 = 1, upsilon+ = 2/3 gives
// Phi = 1/(2 - 1/3) = 0.6; with delta0 = 1, T = 1, sigma'^2 = 4, c_bar = 1 the
// bias norm is 0.6 and the variance term is 0.6.
AMSEInputs scalar_inputs() {
  AMSEInputs in;
  in.gamma0 = 1.0;
  in.delta0 = 1.0;
  in.hessian_at_opt = Mat::Constant(1, 1, 2.0);
  in.T_vector = Vec::Constant(1, 1.0);
  in.sigma_prime_sq = 4.0;
  in.upsilon_plus = 2.0 / 3.0;
  in.c_bar = 1.0;
  return in;
}

Vec point(std::initializer_list<double> vals) {
  Vec v(static_cast<Eigen::Index>(vals.size()));
  Eigen::Index i = 0;
  for (double x : vals) v(i++) = x;
  return v;
}

}  // namespace

TEST_CASE("asymptotic error formula against a hand-solved scalar case") {
  const AMSEResult r = amse(scalar_inputs());
  CHECK(r.bias_part == doctest::Approx(0.36).epsilon(1e-12));
  CHECK(r.variance_part == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(r.total == doctest::Approx(0.96).epsilon(1e-12));
}

TEST_CASE("baseline ratios replace only the fourth-moment constant") {
  AMSEInputs in = scalar_inputs();
  in.c_bar = 0.5;
  // Baseline c_bar = 1: (0.36 + 0.6) / (0.09 + 0.6).
  CHECK(amse_ratio(AmseBaseline::Spsa, in) == doctest::Approx(0.96 / 0.69).epsilon(1e-12));
  // Baseline c_bar = 3: bias norm 1.8.
  CHECK(amse_ratio(AmseBaseline::Gsf, in) == doctest::Approx((3.24 + 0.6) / 0.69).epsilon(1e-12));
  CHECK(amse_ratio(AmseBaseline::Gsf, in) > amse_ratio(AmseBaseline::Spsa, in));
}

TEST_CASE("zero third derivatives make every ratio exactly one") {
  AMSEInputs in = scalar_inputs();
  in.T_vector = Vec::Zero(1);
  in.c_bar = 0.4;
  CHECK(amse(in).bias_part == 0.0);
  CHECK(amse_ratio(AmseBaseline::Gsf, in) == 1.0);
  CHECK(amse_ratio(AmseBaseline::Spsa, in) == 1.0);
}

TEST_CASE("the formula rejects a singular recursion matrix") {
  AMSEInputs in = scalar_inputs();
  in.upsilon_plus = 4.0;  // gamma0 * lambda_min = 2 <= 4/2
  CHECK_THROWS_AS(amse(in), std::invalid_argument);

  AMSEInputs mismatch = scalar_inputs();
  mismatch.T_vector = Vec::Zero(2);
  CHECK_THROWS_AS(amse(mismatch), std::invalid_argument);
}

TEST_CASE("variance term is linear in the observation variance") {
  AMSEInputs in = scalar_inputs();
  const AMSEResult base = amse(in);
  in.sigma_prime_sq *= 2.0;
  const AMSEResult doubled = amse(in);
  CHECK(doubled.variance_part == doctest::Approx(2.0 * base.variance_part).epsilon(1e-12));
  CHECK(doubled.bias_part == base.bias_part);
}

TEST_CASE("third-derivative contractions") {
  SUBCASE("analytic paths") {
    CHECK(t_vector(make_rastrigin(4), Vec::Zero(4)).norm() == 0.0);
    CHECK(t_vector(make_quadratic(), point({3, 1, 4, 1})).norm() == 0.0);
    const Vec t = t_vector(make_saddle_test(), point({0.7, -0.3}));
    CHECK(t(0) == doctest::Approx(-2.8).epsilon(1e-12));
    CHECK(t(1) == 0.0);
  }

  SUBCASE("finite-difference fallback matches the chain-structure closed form") {
    // For the chained banana function the only nonzero third derivatives are
    // f_iii = 2400 x_i (i < d) and f_{i,i,i+1} = -400, so
    // T_i = -400 x_i [i < d] + 200 [i > 1]. The function is quartic, making
    // the central difference of its quadratic Hessian entries exact.
    const ObjectiveSpec s = make_rosenbrock(4);
    REQUIRE(!s.third_deriv_contraction);
    const Vec t1 = t_vector(s, Vec::Ones(4));
    CHECK(t1(0) == doctest::Approx(-400.0).epsilon(1e-6));
    CHECK(t1(1) == doctest::Approx(-200.0).epsilon(1e-6));
    CHECK(t1(2) == doctest::Approx(-200.0).epsilon(1e-6));
    CHECK(t1(3) == doctest::Approx(200.0).epsilon(1e-6));
    const Vec th = t_vector(s, Vec::Constant(4, 0.5));
    CHECK(th(0) == doctest::Approx(-200.0).epsilon(1e-6));
    CHECK(std::abs(th(1)) < 1e-6);
    CHECK(std::abs(th(2)) < 1e-6);
    CHECK(th(3) == doctest::Approx(200.0).epsilon(1e-6));
  }

  SUBCASE("finite differences agree with an analytic contraction") {
    ObjectiveSpec s = make_rastrigin(4);
    const Vec x = point({0.25, -0.1, 0.4, 0.0});
    const Vec analytic = t_vector(s, x);
    s.third_deriv_contraction = nullptr;
    const Vec fd = t_vector(s, x);
    CHECK((analytic - fd).norm() < 1e-3 * std::max(1.0, analytic.norm()));
  }
}

TEST_CASE("bias probe validation") {
  const NoisyObjective obj(make_quadratic(), NoiseModel::none());
  const NoisyObjective noisy(make_quadratic(), NoiseModel::type1());
  RandomStream rng(1);
  const std::vector<double> grid{0.4, 0.2, 0.1, 0.05};
  const Vec x = Vec::Constant(4, 1.0);

  CHECK_THROWS_AS(bias_probe(EstimatorKind::tcsf(), obj, x, {0.4, 0.2, 0.1}, 2000, 0.43, 0.0, rng),
                  std::invalid_argument);
  CHECK_THROWS_AS(bias_probe(EstimatorKind::tcsf(), obj, x, {0.4, 0.2, 0.2, 0.1}, 2000, 0.43, 0.0, rng),
                  std::invalid_argument);
  CHECK_THROWS_AS(bias_probe(EstimatorKind::tcsf(), obj, x, {0.4, 0.2, 0.1, -0.05}, 2000, 0.43, 0.0, rng),
                  std::invalid_argument);
  CHECK_THROWS_AS(bias_probe(EstimatorKind::tcsf(), noisy, x, grid, 2000, 0.43, 0.0, rng),
                  std::invalid_argument);
  CHECK_THROWS_AS(bias_probe(EstimatorKind::tcsf(), obj, x, grid, 999, 0.43, 0.0, rng),
                  std::invalid_argument);
}

TEST_CASE("a linear objective leaves no detectable bias") {
  ObjectiveSpec lin;
  lin.name = "linear";
  lin.dim = 2;
  Vec a = point({2.0, -1.0});
  lin.eval_true = [a](const Vec& x) { return a.dot(x); };
  lin.grad_true = [a](const Vec&) { return a; };
  lin.box_lo = Vec::Constant(2, -1.0);
  lin.box_hi = Vec::Constant(2, 1.0);
  const NoisyObjective obj(lin, NoiseModel::none());

  RandomStream rng(2);
  const double c2 = c2_for(PerturbationKind::truncated_cauchy_exact(), 2);
  const BiasProbeReport rep = bias_probe(EstimatorKind::tcsf(), obj, Vec::Zero(2),
                                         {0.4, 0.2, 0.1, 0.05}, 2000, c2, 0.0, rng);
  CHECK(rep.degenerate);
  CHECK(std::isnan(rep.fitted_slope));
  CHECK(rep.n_samples_used == 8000);  // adaptive doubling exhausted its 4x budget
}

TEST_CASE("balanced bias decays quadratically in the smoothing radius") {
  const NoisyObjective obj(make_rosenbrock(4), NoiseModel::none());
  const Vec x = Vec::Constant(4, 0.5);
  RandomStream rng(3);
  const double c2 = c2_for(PerturbationKind::truncated_cauchy_exact(), 4);
  // The balanced difference kills every even order; the quartic objective has
  // zero fifth derivatives, so the bias is exactly proportional to delta^2.
  const BiasProbeReport rep = bias_probe(EstimatorKind::tcsf_balanced(), obj, x,
                                         {0.8, 0.4, 0.2, 0.1}, 50000, c2, 1e-4, rng);
  CHECK(!rep.degenerate);
  CHECK(rep.fitted_slope > 1.7);
  CHECK(rep.fitted_slope < 2.5);
  // Norms decrease along the decreasing grid.
  for (size_t i = 1; i < rep.bias_norms.size(); ++i)
    CHECK(rep.bias_norms[i] < rep.bias_norms[i - 1]);
}

TEST_CASE("second-moment scaling") {
  RandomStream rng(4);
  const std::vector<double> grid{0.4, 0.2, 0.1, 0.05};

  SUBCASE("noiseless linear: no delta dependence") {
    ObjectiveSpec lin;
    lin.name = "linear";
    lin.dim = 3;
    Vec a = point({1.0, 2.0, -1.0});
    lin.eval_true = [a](const Vec& x) { return a.dot(x); };
    lin.grad_true = [a](const Vec&) { return a; };
    lin.box_lo = Vec::Constant(3, -1.0);
    lin.box_hi = Vec::Constant(3, 1.0);
    const NoisyObjective obj(lin, NoiseModel::none());
    const SecondMomentReport rep =
        second_moment_probe(EstimatorKind::tcsf_balanced(), obj, Vec::Zero(3), grid, 20000, rng);
    CHECK(std::abs(rep.fitted_slope) < 0.1);
  }

  SUBCASE("independent noise blows up like delta^-2") {
    const NoisyObjective obj(make_quadratic(), NoiseModel::type1(5.0));
    const SecondMomentReport rep = second_moment_probe(
        EstimatorKind::tcsf(), obj, Vec::Constant(4, 5.0), grid, 50000, rng);
    CHECK(rep.fitted_slope > -2.4);
    CHECK(rep.fitted_slope < -1.6);
  }

  SUBCASE("a shared draw caps the blow-up") {
    const NoisyObjective obj(make_quadratic(), NoiseModel::type1(5.0));
    RandomStream rng_a(5), rng_b(5);
    const SecondMomentReport fresh = second_moment_probe(
        EstimatorKind::tcsf(), obj, Vec::Constant(4, 5.0), grid, 20000, rng_a);
    const SecondMomentReport crn = second_moment_probe(
        EstimatorKind::tcsf_crn(), obj, Vec::Constant(4, 5.0), grid, 20000, rng_b);
    for (size_t i = 0; i < grid.size(); ++i) CHECK(crn.second_moments[i] < fresh.second_moments[i]);
  }

  SUBCASE("standard errors shrink like 1/sqrt(n)") {
    const NoisyObjective obj(make_quadratic(), NoiseModel::none());
    RandomStream rng_a(6), rng_b(6);
    const SecondMomentReport small = second_moment_probe(
        EstimatorKind::tcsf(), obj, Vec::Constant(4, 5.0), grid, 4000, rng_a);
    const SecondMomentReport big = second_moment_probe(
        EstimatorKind::tcsf(), obj, Vec::Constant(4, 5.0), grid, 16000, rng_b);
    for (size_t i = 0; i < grid.size(); ++i) {
      const double ratio = small.ses[i] / big.ses[i];
      CHECK(ratio > 1.6);
      CHECK(ratio < 2.4);
    }
  }

  SUBCASE("validation") {
    const NoisyObjective obj(make_quadratic(), NoiseModel::none());
    CHECK_THROWS_AS(second_moment_probe(EstimatorKind::tcsf(), obj, Vec::Zero(4), grid, 500, rng),
                    std::invalid_argument);
    CHECK_THROWS_AS(
        second_moment_probe(EstimatorKind::tcsf(), obj, Vec::Zero(4), {0.1, 0.2, 0.3, 0.4}, 2000, rng),
        std::invalid_argument);
  }
}
