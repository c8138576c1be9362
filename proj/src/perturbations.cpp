#include "tcsf/perturbations.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace tcsf {

namespace {

using boost::math::quadrature::gauss_kronrod;

double radial_integral(int dim, int extra_power, int half_power_shift) {
  // \int_0^1 r^{dim-1+extra_power} (1+r^2)^{-(dim+1)/2 - half_power_shift} dr
  const double expo = -(static_cast<double>(dim) + 1.0) / 2.0 - half_power_shift;
  auto f = [&](double r) {
    return std::pow(r, dim - 1 + extra_power) * std::pow(1.0 + r * r, expo);
  };
  return gauss_kronrod<double, 61>::integrate(f, 0.0, 1.0, 12, 1e-14);
}

double unit_ball_surface(int dim) {
  // Surface area of the unit sphere S^{d-1}: 2*pi^{d/2}/Gamma(d/2).
  return 2.0 * std::pow(3.141592653589793238462643383279502884, dim / 2.0) /
         std::tgamma(dim / 2.0);
}

Vec gaussian_vector(int dim, RandomStream& rng) {
  Vec z(dim);
  for (int i = 0; i < dim; ++i) z(i) = rng.normal();
  return z;
}

std::mutex cache_mutex;

}  // namespace

PerturbationKind PerturbationKind::uniform_interval(double lo, double hi) {
  if (!(lo < hi)) throw std::invalid_argument("UniformInterval requires lo < hi");
  return {Tag::UniformInterval, lo, hi};
}

std::string PerturbationKind::name() const {
  switch (tag) {
    case Tag::TruncatedCauchyExact: return "truncated-cauchy-exact";
    case Tag::TProjectedSphere: return "t-projected-sphere";
    case Tag::Gaussian: return "gaussian";
    case Tag::Rademacher: return "rademacher";
    case Tag::UniformInterval: return "uniform-interval";
  }
  return "unknown";
}

double compute_normalization(int dim) {
  if (dim < 1) throw std::invalid_argument("compute_normalization: dim must be >= 1");
  static std::map<int, double> cache;
  std::lock_guard<std::mutex> lock(cache_mutex);
  auto it = cache.find(dim);
  if (it != cache.end()) return it->second;

  // Unit ball integral of the un-normalized kernel
  //   Gamma((d+1)/2)/pi^{(d+1)/2} * (1+||u||^2)^{-(d+1)/2}
  // reduces to the radial form S_{d-1} * I_d. c1 is the value making the
  // truncated density integrate to 1 over the unit ball (delta = 1).
  const double pi = 3.141592653589793238462643383279502884;
  const double kernel_coef = std::tgamma((dim + 1) / 2.0) / std::pow(pi, (dim + 1) / 2.0);
  const double c1 = kernel_coef * unit_ball_surface(dim) * radial_integral(dim, 0, 0);
  cache[dim] = c1;
  return c1;
}

double density_truncated_cauchy(const Vec& u, double delta, const DistributionConstants& consts) {
  if (delta <= 0.0) throw std::invalid_argument("density_truncated_cauchy: delta must be > 0");
  const int d = static_cast<int>(u.size());
  if (consts.dim != d) throw std::invalid_argument("density_truncated_cauchy: dimension mismatch");
  const double nsq = u.squaredNorm();
  if (nsq > delta * delta) return 0.0;
  const double pi = 3.141592653589793238462643383279502884;
  const double coef =
      std::tgamma((d + 1) / 2.0) / (std::pow(pi, (d + 1) / 2.0) * consts.c1 * std::pow(delta, d));
  return coef * std::pow(1.0 + nsq / (delta * delta), -(d + 1) / 2.0);
}

PerturbationSample sample(const PerturbationKind& kind, int dim, RandomStream& rng) {
  if (dim < 1) throw std::invalid_argument("sample: dim must be >= 1");
  Vec u(dim);
  switch (kind.tag) {
    case PerturbationKind::Tag::TruncatedCauchyExact: {
      // Uniform-ball proposal: normalized Gaussian direction times U^{1/d}.
      for (;;) {
        Vec z = gaussian_vector(dim, rng);
        const double zn = z.norm();
        const double r = std::pow(rng.u01(), 1.0 / dim);
        u = z * (r / zn);
        const double accept = std::pow(1.0 + u.squaredNorm(), -(dim + 1) / 2.0);
        if (rng.u01() <= accept) break;
      }
      break;
    }
    case PerturbationKind::Tag::TProjectedSphere: {
      // Multivariate t with one degree of freedom, projected to the unit sphere.
      Vec z = gaussian_vector(dim, rng);
      const double g = rng.normal();
      Vec t = z / std::max(std::abs(g), 1e-300);
      u = t / t.norm();
      break;
    }
    case PerturbationKind::Tag::Gaussian:
      u = gaussian_vector(dim, rng);
      break;
    case PerturbationKind::Tag::Rademacher:
      for (int i = 0; i < dim; ++i) u(i) = rng.rademacher();
      break;
    case PerturbationKind::Tag::UniformInterval:
      for (int i = 0; i < dim; ++i) u(i) = rng.uniform(kind.lo, kind.hi);
      break;
  }
  return {u, kind};
}

DistributionConstants estimate_constants(const PerturbationKind& kind, int dim, long n_samples,
                                         RandomStream& rng) {
  if (n_samples < 10000) throw std::invalid_argument("estimate_constants: n_samples must be >= 1e4");
  double sum_c2 = 0.0, sumsq_c2 = 0.0, sum_cb = 0.0, sumsq_cb = 0.0;
  for (long i = 0; i < n_samples; ++i) {
    const PerturbationSample s = sample(kind, dim, rng);
    const double nsq = s.u.squaredNorm();
    const double v2 = (dim + 1) * s.u(0) * s.u(0) / (1.0 + nsq);
    const double vb = nsq * nsq;
    sum_c2 += v2;
    sumsq_c2 += v2 * v2;
    sum_cb += vb;
    sumsq_cb += vb * vb;
  }
  const double n = static_cast<double>(n_samples);
  DistributionConstants out;
  out.dim = dim;
  out.c2 = sum_c2 / n;
  out.c2_se = std::sqrt(std::max(0.0, sumsq_c2 / n - out.c2 * out.c2) / n);
  out.c_bar = sum_cb / n;
  out.c_bar_se = std::sqrt(std::max(0.0, sumsq_cb / n - out.c_bar * out.c_bar) / n);
  out.n_samples = n_samples;
  if (kind.tag == PerturbationKind::Tag::TruncatedCauchyExact) {
    out.c1 = compute_normalization(dim);
    const double pi = 3.141592653589793238462643383279502884;
    out.c11 = 2.0 * std::tgamma((dim + 1) / 2.0) /
              (std::sqrt(pi) * std::tgamma(dim / 2.0) * out.c1);
  }
  return out;
}

DistributionConstants exact_constants(int dim) {
  DistributionConstants out;
  out.dim = dim;
  out.c1 = compute_normalization(dim);
  const double pi = 3.141592653589793238462643383279502884;
  out.c11 =
      2.0 * std::tgamma((dim + 1) / 2.0) / (std::sqrt(pi) * std::tgamma(dim / 2.0) * out.c1);
  // Radial reductions: E[g(||u||)] = \int_0^1 g(r) r^{d-1}(1+r^2)^{-(d+1)/2} dr / I_d.
  const double i_d = radial_integral(dim, 0, 0);
  // c2 = (d+1)/d * E[||u||^2/(1+||u||^2)]
  out.c2 = (dim + 1.0) / dim * radial_integral(dim, 2, 1) / i_d;
  out.c_bar = radial_integral(dim, 4, 0) / i_d;
  return out;
}

double c2_for(const PerturbationKind& kind, int dim) {
  switch (kind.tag) {
    case PerturbationKind::Tag::TruncatedCauchyExact:
      return exact_constants(dim).c2;
    case PerturbationKind::Tag::TProjectedSphere:
      // ||u|| = 1, E[(u^1)^2] = 1/d, so E[(d+1)(u^1)^2/2] = (d+1)/(2d).
      return (dim + 1.0) / (2.0 * dim);
    default: {
      static std::map<std::pair<int, int>, double> cache;
      std::lock_guard<std::mutex> lock(cache_mutex);
      auto key = std::make_pair(static_cast<int>(kind.tag), dim);
      auto it = cache.find(key);
      if (it != cache.end()) return it->second;
      RandomStream rng(0x7C2F0Aull + dim);
      auto consts = estimate_constants(kind, dim, 1000000, rng);
      cache[key] = consts.c2;
      return consts.c2;
    }
  }
}

MomentEstimate moment(const PerturbationKind& kind, int r, int dim, long n_samples,
                      RandomStream& rng) {
  if (r < 1) throw std::invalid_argument("moment: r must be >= 1");
  double sum = 0.0, sumsq = 0.0;
  for (long i = 0; i < n_samples; ++i) {
    const PerturbationSample s = sample(kind, dim, rng);
    const double v = std::pow(s.u.squaredNorm(), r);
    sum += v;
    sumsq += v * v;
  }
  const double n = static_cast<double>(n_samples);
  MomentEstimate out;
  out.value = sum / n;
  out.se = std::sqrt(std::max(0.0, sumsq / n - out.value * out.value) / n);
  out.n = n_samples;
  return out;
}

double moment_bound(int r, int dim) {
  return exact_constants(dim).c11 / (r + dim);
}

}  // namespace tcsf
