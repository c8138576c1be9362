#include "tcsf/objectives.hpp"

#include <cmath>
#include <stdexcept>

namespace tcsf {

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
}

NoiseDraw NoisyObjective::draw_noise(RandomStream& rng) const {
  NoiseDraw draw;
  switch (noise_.kind) {
    case NoiseModel::Kind::None:
      break;
    case NoiseModel::Kind::Type1: {
      draw.eta.resize(spec_.dim + 1);
      for (int i = 0; i <= spec_.dim; ++i) draw.eta(i) = noise_.sigma * rng.normal();
      break;
    }
    case NoiseModel::Kind::Type2:
    case NoiseModel::Kind::Type3:
    case NoiseModel::Kind::AdditiveFixed:
      draw.z = rng.normal();
      break;
  }
  return draw;
}

double NoisyObjective::noise_at(const NoiseDraw& draw, const Vec& x, bool* degenerate) const {
  switch (noise_.kind) {
    case NoiseModel::Kind::None:
      return 0.0;
    case NoiseModel::Kind::Type1:
      return x.dot(draw.eta.head(spec_.dim)) + draw.eta(spec_.dim);
    case NoiseModel::Kind::AdditiveFixed:
      return noise_.sigma * draw.z;
    case NoiseModel::Kind::Type2:
    case NoiseModel::Kind::Type3: {
      const double norm = x.norm();
      double var;
      if (noise_.kind == NoiseModel::Kind::Type2) {
        var = std::log(norm);
      } else {
        var = 1.0 / (1.0 + std::log(norm));
      }
      const bool bad = !std::isfinite(var) || var <= 0.0;
      if (bad) {
        var = noise_.variance_floor;
        if (degenerate) *degenerate = true;
      } else if (var < noise_.variance_floor) {
        var = noise_.variance_floor;
      }
      return std::sqrt(var) * draw.z;
    }
  }
  return 0.0;
}

double NoisyObjective::observe(const Vec& x, RandomStream& rng, bool* degenerate) const {
  const NoiseDraw draw = draw_noise(rng);
  return spec_.eval_true(x) + noise_at(draw, x, degenerate);
}

ObjectiveSpec make_rastrigin(int dim) {
  if (dim < 1) throw std::invalid_argument("make_rastrigin: dim must be >= 1");
  ObjectiveSpec s;
  s.name = "rastrigin";
  s.dim = dim;
  s.eval_true = [dim](const Vec& x) {
    double f = 10.0 * dim;
    for (int i = 0; i < dim; ++i) f += x(i) * x(i) - 10.0 * std::cos(2.0 * kPi * x(i));
    return f;
  };
  s.grad_true = [dim](const Vec& x) {
    Vec g(dim);
    for (int i = 0; i < dim; ++i) g(i) = 2.0 * x(i) + 20.0 * kPi * std::sin(2.0 * kPi * x(i));
    return g;
  };
  s.hess_true = [dim](const Vec& x) {
    Mat h = Mat::Zero(dim, dim);
    for (int i = 0; i < dim; ++i) h(i, i) = 2.0 + 40.0 * kPi * kPi * std::cos(2.0 * kPi * x(i));
    return h;
  };
  // Separable: cross third derivatives vanish; d^3 f / dx_i^3 = -80 pi^3 sin(2 pi x_i).
  s.third_deriv_contraction = [dim](const Vec& x) {
    Vec t(dim);
    for (int i = 0; i < dim; ++i) t(i) = (80.0 * kPi * kPi * kPi / 6.0) * std::sin(2.0 * kPi * x(i));
    return t;
  };
  s.known_min_value = 0.0;
  s.known_minimizer = Vec::Zero(dim);
  s.lipschitz_grad_L = 2.0 + 40.0 * kPi * kPi;
  s.box_lo = Vec::Zero(dim);
  s.box_hi = Vec::Constant(dim, 10.0);
  return s;
}

ObjectiveSpec make_rosenbrock(int dim) {
  if (dim < 2) throw std::invalid_argument("make_rosenbrock: dim must be >= 2");
  ObjectiveSpec s;
  s.name = "rosenbrock";
  s.dim = dim;
  s.eval_true = [dim](const Vec& x) {
    double f = 0.0;
    for (int i = 0; i + 1 < dim; ++i) {
      const double a = x(i + 1) - x(i) * x(i);
      const double b = 1.0 - x(i);
      f += 100.0 * a * a + b * b;
    }
    return f;
  };
  s.grad_true = [dim](const Vec& x) {
    Vec g = Vec::Zero(dim);
    for (int i = 0; i + 1 < dim; ++i) {
      const double a = x(i + 1) - x(i) * x(i);
      g(i) += -400.0 * x(i) * a - 2.0 * (1.0 - x(i));
      g(i + 1) += 200.0 * a;
    }
    return g;
  };
  s.hess_true = [dim](const Vec& x) {
    Mat h = Mat::Zero(dim, dim);
    for (int i = 0; i + 1 < dim; ++i) {
      h(i, i) += 1200.0 * x(i) * x(i) - 400.0 * x(i + 1) + 2.0;
      h(i + 1, i + 1) += 200.0;
      h(i, i + 1) += -400.0 * x(i);
      h(i + 1, i) += -400.0 * x(i);
    }
    return h;
  };
  // third_deriv_contraction left empty on purpose: exercises the
  // finite-difference fallback in t_vector().
  s.known_min_value = 0.0;
  s.known_minimizer = Vec::Ones(dim);
  s.box_lo = Vec::Zero(dim);
  s.box_hi = Vec::Constant(dim, 10.0);
  return s;
}

Mat quadratic_A() {
  Mat a(4, 4);
  // The (1,4)/(4,1) pair is symmetrized to 1.4507.
  a << 2.3346, 1.1384, 2.5606, 1.4507,
       1.1384, 0.7860, 1.2743, 0.9531,
       2.5606, 1.2743, 2.8147, 1.6487,
       1.4507, 0.9531, 1.6487, 1.8123;
  return a;
}

Vec quadratic_b() {
  Vec b(4);
  b << 0.4218, 0.9157, 0.7922, 0.9595;
  return b;
}

ObjectiveSpec make_quadratic() {
  const Mat a = quadratic_A();
  const Vec b = quadratic_b();

  Eigen::FullPivLU<Mat> lu(a);
  if (!lu.isInvertible() || lu.rcond() < 1e-10)
    throw std::runtime_error("make_quadratic: A is singular to working precision");
  const Vec xstar = lu.solve(b);

  Eigen::SelfAdjointEigenSolver<Mat> eig(a);
  const double lmax = eig.eigenvalues().maxCoeff();
  const double lmin = eig.eigenvalues().minCoeff();
  if (lmin <= 0.0) throw std::runtime_error("make_quadratic: A is not positive definite");

  ObjectiveSpec s;
  s.name = "quadratic";
  s.dim = 4;
  s.eval_true = [a, b](const Vec& x) { return 0.5 * x.dot(a * x) - b.dot(x); };
  s.grad_true = [a, b](const Vec& x) { return Vec(a * x - b); };
  s.hess_true = [a](const Vec&) { return a; };
  s.third_deriv_contraction = [](const Vec& x) { return Vec(Vec::Zero(x.size())); };
  s.known_min_value = -0.5 * b.dot(xstar);
  s.known_minimizer = xstar;
  s.lipschitz_grad_L = lmax;
  s.box_lo = Vec::Zero(4);
  s.box_hi = Vec::Constant(4, 150.0);
  return s;
}

ObjectiveSpec make_saddle_test() {
  ObjectiveSpec s;
  s.name = "double-well";
  s.dim = 2;
  s.eval_true = [](const Vec& x) {
    const double w = x(0) * x(0) - 1.0;
    return w * w + x(1) * x(1);
  };
  s.grad_true = [](const Vec& x) {
    Vec g(2);
    g(0) = 4.0 * x(0) * (x(0) * x(0) - 1.0);
    g(1) = 2.0 * x(1);
    return g;
  };
  s.hess_true = [](const Vec& x) {
    Mat h = Mat::Zero(2, 2);
    h(0, 0) = 12.0 * x(0) * x(0) - 4.0;
    h(1, 1) = 2.0;
    return h;
  };
  s.third_deriv_contraction = [](const Vec& x) {
    Vec t(2);
    t(0) = -4.0 * x(0);  // -(1/6) * 24 x
    t(1) = 0.0;
    return t;
  };
  s.known_min_value = 0.0;
  Vec m(2);
  m << 1.0, 0.0;
  s.known_minimizer = m;
  s.box_lo = Vec::Constant(2, -2.0);
  s.box_hi = Vec::Constant(2, 2.0);
  return s;
}

}  // namespace tcsf
