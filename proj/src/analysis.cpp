#include "tcsf/analysis.hpp"

#include <cmath>
#include <stdexcept>

namespace tcsf {

namespace {

// OLS slope of y against x.
double ols_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  const size_t n = xs.size();
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (size_t i = 0; i < n; ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  return sxy / sxx;
}

void check_grid(const std::vector<double>& grid) {
  if (grid.size() < 4) throw std::invalid_argument("probe: delta grid needs >= 4 points");
  for (size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] <= 0.0) throw std::invalid_argument("probe: delta grid must be positive");
    if (i > 0 && grid[i] >= grid[i - 1])
      throw std::invalid_argument("probe: delta grid must be strictly decreasing");
  }
}

AMSEResult amse_with_cbar(const AMSEInputs& in, double c_bar) {
  const auto d = in.hessian_at_opt.rows();
  if (in.hessian_at_opt.cols() != d || in.T_vector.size() != d)
    throw std::invalid_argument("amse: dimension mismatch");

  Eigen::SelfAdjointEigenSolver<Mat> eig(in.hessian_at_opt);
  const double lmin = eig.eigenvalues().minCoeff();
  if (in.gamma0 * lmin <= in.upsilon_plus / 2.0)
    throw std::invalid_argument("amse: gamma0*lambda_min(H) <= upsilon_plus/2, Phi is singular");

  const Mat phi =
      (in.gamma0 * in.hessian_at_opt - 0.5 * in.upsilon_plus * Mat::Identity(d, d)).inverse();
  const double bias_norm = c_bar * in.delta0 * in.delta0 * in.gamma0 * (phi * in.T_vector).norm();
  const double p_diag = in.sigma_prime_sq / 4.0;

  AMSEResult out;
  out.bias_part = bias_norm * bias_norm;
  out.variance_part = p_diag * phi.trace() / (in.delta0 * in.delta0);
  out.total = out.bias_part + out.variance_part;
  return out;
}

}  // namespace

AMSEResult amse(const AMSEInputs& inputs) { return amse_with_cbar(inputs, inputs.c_bar); }

double amse_ratio(AmseBaseline baseline, const AMSEInputs& inputs) {
  const double baseline_cbar = baseline == AmseBaseline::Gsf ? 3.0 : 1.0;
  return amse_with_cbar(inputs, baseline_cbar).total / amse(inputs).total;
}

BiasProbeReport bias_probe(const EstimatorKind& kind, const NoisyObjective& obj, const Vec& x,
                           const std::vector<double>& delta_grid, long n_samples, double c2_hat,
                           double c2_hat_se, RandomStream& rng) {
  check_grid(delta_grid);
  if (obj.noise_model().kind != NoiseModel::Kind::None)
    throw std::invalid_argument("bias_probe: objective must be noiseless");
  if (n_samples < 1000) throw std::invalid_argument("bias_probe: n_samples must be >= 1e3");

  const int d = static_cast<int>(x.size());
  const Vec target = c2_hat * obj.spec().grad_true(x);
  const Vec grad = obj.spec().grad_true(x);

  BiasProbeReport rep;
  rep.estimator = kind;
  rep.delta_grid = delta_grid;

  long n = n_samples;
  for (int attempt = 0;; ++attempt) {
    rep.bias_norms.clear();
    rep.bias_norm_ses.clear();
    rep.degenerate = false;
    bool need_more = false;
    RandomStream pass_rng = rng.split(0xB1A5 + attempt);

    for (size_t gi = 0; gi < delta_grid.size(); ++gi) {
      RandomStream grid_rng = pass_rng.split(gi);
      Vec sum = Vec::Zero(d), sumsq = Vec::Zero(d);
      for (long i = 0; i < n; ++i) {
        const GradientEstimate e = estimate(kind, obj, x, delta_grid[gi], grid_rng);
        sum += e.g;
        sumsq += e.g.cwiseProduct(e.g);
      }
      const Vec mean = sum / static_cast<double>(n);
      const Vec var = (sumsq / static_cast<double>(n) - mean.cwiseProduct(mean)).cwiseMax(0.0);
      const Vec bias = mean - target;
      const double norm = bias.norm();
      // Combined per-component variance: MC variance of the mean plus the
      // c2_hat uncertainty scaled by the gradient; delta method for the norm.
      double se_sq = 0.0;
      for (int j = 0; j < d; ++j) {
        const double comp_var =
            var(j) / static_cast<double>(n) + c2_hat_se * c2_hat_se * grad(j) * grad(j);
        const double w = norm > 0.0 ? bias(j) / norm : 1.0 / std::sqrt(static_cast<double>(d));
        se_sq += w * w * comp_var;
      }
      rep.bias_norms.push_back(norm);
      rep.bias_norm_ses.push_back(std::sqrt(se_sq));
      // Target: MC error under 20% of the norm (norm > 5 SE); below 3 SE the
      // bias is indistinguishable from zero and the slope fit is meaningless.
      if (norm < 5.0 * rep.bias_norm_ses.back()) need_more = true;
      if (norm < 3.0 * rep.bias_norm_ses.back()) rep.degenerate = true;
    }
    rep.n_samples_used = n;
    if (!need_more || attempt >= 2) break;  // adaptive n, at most 4x the request
    n *= 2;
  }

  if (rep.degenerate) {
    rep.fitted_slope = std::nan("");
    return rep;
  }
  std::vector<double> lx, ly;
  for (size_t i = 0; i < delta_grid.size(); ++i) {
    lx.push_back(std::log(delta_grid[i]));
    ly.push_back(std::log(rep.bias_norms[i]));
  }
  rep.fitted_slope = ols_slope(lx, ly);
  return rep;
}

SecondMomentReport second_moment_probe(const EstimatorKind& kind, const NoisyObjective& obj,
                                       const Vec& x, const std::vector<double>& delta_grid,
                                       long n_samples, RandomStream& rng) {
  check_grid(delta_grid);
  if (n_samples < 1000)
    throw std::invalid_argument("second_moment_probe: n_samples must be >= 1e3");

  SecondMomentReport rep;
  rep.estimator = kind;
  rep.delta_grid = delta_grid;
  rep.n_samples_used = n_samples;

  for (size_t gi = 0; gi < delta_grid.size(); ++gi) {
    RandomStream grid_rng = rng.split(0x5EC0 + gi);
    double sum = 0.0, sumsq = 0.0;
    for (long i = 0; i < n_samples; ++i) {
      const GradientEstimate e = estimate(kind, obj, x, delta_grid[gi], grid_rng);
      const double v = e.g.squaredNorm();
      sum += v;
      sumsq += v * v;
    }
    const double mean = sum / static_cast<double>(n_samples);
    rep.second_moments.push_back(mean);
    rep.ses.push_back(
        std::sqrt(std::max(0.0, sumsq / n_samples - mean * mean) / static_cast<double>(n_samples)));
  }

  std::vector<double> lx, ly;
  for (size_t i = 0; i < delta_grid.size(); ++i) {
    lx.push_back(std::log(delta_grid[i]));
    ly.push_back(std::log(rep.second_moments[i]));
  }
  rep.fitted_slope = ols_slope(lx, ly);
  return rep;
}

Vec t_vector(const ObjectiveSpec& spec, const Vec& x) {
  if (spec.third_deriv_contraction) return spec.third_deriv_contraction(x);
  if (!spec.hess_true)
    throw std::invalid_argument("t_vector: objective has neither third derivatives nor a Hessian");
  const int d = spec.dim;
  const double h = 1e-3;
  Vec t(d);
  for (int i = 0; i < d; ++i) {
    Vec xp = x, xm = x;
    xp(i) += h;
    xm(i) -= h;
    const Mat dH = (spec.hess_true(xp) - spec.hess_true(xm)) / (2.0 * h);  // dH/dx_i
    double acc = dH(i, i);  // f_iii
    for (int j = 0; j < d; ++j)
      if (j != i) acc += 3.0 * dH(j, j);  // f_jji
    t(i) = -acc / 6.0;
  }
  return t;
}

}  // namespace tcsf
