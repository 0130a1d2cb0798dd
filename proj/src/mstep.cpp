#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <numbers>
#include <stdexcept>

#include "statusrank/em.hpp"
#include "statusrank/random.hpp"

namespace statusrank {

namespace {

constexpr double kMinLogInput = 1e-10;
constexpr double kHuge = 1e300;

/// Precomputed pieces of the expected log-likelihood, split into the alpha
/// block (log amp, log sigma) and the beta block (c0..c4, log peak amp, log peak sigma).
class ObjectiveTables {
 public:
  explicit ObjectiveTables(const RankHistograms& h) : n_(h.n) {
    for (int z = 1; z < n_; ++z) {
      for (int zz : {z, -z}) {
        Point pt;
        pt.weight = n_ - z;
        pt.z2 = static_cast<double>(z) * z;
        pt.a = h.a_at(zz);
        pt.b = h.b_at(zz);
        const double theta = std::numbers::pi * (static_cast<double>(zz) / (n_ - 1) + 1.0) / 2.0;
        for (std::size_t k = 0; k < 5; ++k) pt.basis[k] = std::cos(static_cast<double>(k) * theta);
        (zz > 0 ? positive_ : negative_).push_back(pt);
      }
    }
  }

  double alpha_block(const double* x, double* grad) const {
    const double amp = std::exp(x[0]);
    const double sigma = std::exp(x[1]);
    double f = 0.0, g0 = 0.0, g1 = 0.0;
    for (const Point& pt : positive_) {
      const double al = amp * std::exp(-0.5 * pt.z2 / (sigma * sigma));
      f += pt.weight * (pt.a * std::log(std::max(al, kLogFloor)) - al);
      const double d = pt.weight * ((al > kLogFloor ? pt.a / al : 0.0) - 1.0) * al;
      g0 += d;
      g1 += d * pt.z2 / (sigma * sigma);
    }
    if (grad != nullptr) {
      grad[0] = g0;
      grad[1] = g1;
    }
    return f;
  }

  double beta_block(const double* x, double* grad) const {
    const double peak_amp = std::exp(x[5]);
    const double peak_sigma = std::exp(x[6]);
    double f = 0.0;
    std::array<double, 7> g{};
    for (const auto* side : {&positive_, &negative_}) {
      for (const Point& pt : *side) {
        double series = 0.0;
        for (std::size_t k = 0; k < 5; ++k) series += x[k] * pt.basis[k];
        const double peak = peak_amp * std::exp(-0.5 * pt.z2 / (peak_sigma * peak_sigma));
        const double be = series * series + peak;
        f += pt.weight * (pt.b * std::log(std::max(be, kLogFloor)) - be);
        const double d = pt.weight * ((be > kLogFloor ? pt.b / be : 0.0) - 1.0);
        for (std::size_t k = 0; k < 5; ++k) g[k] += d * 2.0 * series * pt.basis[k];
        g[5] += d * peak;
        g[6] += d * peak * pt.z2 / (peak_sigma * peak_sigma);
      }
    }
    if (grad != nullptr) std::copy(g.begin(), g.end(), grad);
    return f;
  }

  /// Mean per-pair one-way claim level implied by b.
  double beta_level() const {
    double total = 0.0;
    for (const auto* side : {&positive_, &negative_}) {
      for (const Point& pt : *side) total += pt.weight * pt.b;
    }
    return total / (static_cast<double>(n_) * (n_ - 1));
  }

 private:
  struct Point {
    double weight = 0.0;
    double z2 = 0.0;
    double a = 0.0;
    double b = 0.0;
    std::array<double, 5> basis{};
  };
  int n_;
  std::vector<Point> positive_;
  std::vector<Point> negative_;
};

using BlockFn = std::function<double(const double* x, double* grad)>;

struct GslContext {
  const BlockFn* fn;
  std::size_t dim;
};

double gsl_f(const gsl_vector* x, void* params) {
  const auto* ctx = static_cast<GslContext*>(params);
  const double v = -(*ctx->fn)(x->data, nullptr);
  return std::isfinite(v) ? v : kHuge;
}

void gsl_df(const gsl_vector* x, void* params, gsl_vector* g) {
  const auto* ctx = static_cast<GslContext*>(params);
  std::vector<double> grad(ctx->dim);
  (*ctx->fn)(x->data, grad.data());
  for (std::size_t i = 0; i < ctx->dim; ++i) gsl_vector_set(g, i, std::isfinite(grad[i]) ? -grad[i] : 0.0);
}

void gsl_fdf(const gsl_vector* x, void* params, double* f, gsl_vector* g) {
  const auto* ctx = static_cast<GslContext*>(params);
  std::vector<double> grad(ctx->dim);
  const double v = -(*ctx->fn)(x->data, grad.data());
  *f = std::isfinite(v) ? v : kHuge;
  for (std::size_t i = 0; i < ctx->dim; ++i) gsl_vector_set(g, i, std::isfinite(grad[i]) ? -grad[i] : 0.0);
}

struct BlockOutcome {
  std::vector<double> x;
  double value = -std::numeric_limits<double>::infinity();
  bool converged = false;
};

/// Maximizes fn by BFGS, restarting the minimizer from its last point when it
/// stalls before meeting the gradient tolerance.
BlockOutcome maximize(const BlockFn& fn, std::vector<double> x0) {
  const std::size_t dim = x0.size();
  GslContext ctx{&fn, dim};
  gsl_multimin_function_fdf func{&gsl_f, &gsl_df, &gsl_fdf, dim, &ctx};

  BlockOutcome best{x0, fn(x0.data(), nullptr), false};
  std::unique_ptr<gsl_multimin_fdfminimizer, decltype(&gsl_multimin_fdfminimizer_free)> solver(
      gsl_multimin_fdfminimizer_alloc(gsl_multimin_fdfminimizer_vector_bfgs2, dim), &gsl_multimin_fdfminimizer_free);
  std::unique_ptr<gsl_vector, decltype(&gsl_vector_free)> start(gsl_vector_alloc(dim), &gsl_vector_free);

  for (int attempt = 0; attempt < 4 && !best.converged; ++attempt) {
    for (std::size_t i = 0; i < dim; ++i) gsl_vector_set(start.get(), i, best.x[i]);
    gsl_multimin_fdfminimizer_set(solver.get(), &func, start.get(), 0.1, 0.1);
    const double entry = best.value;
    for (int iter = 0; iter < 2000; ++iter) {
      if (gsl_multimin_fdfminimizer_iterate(solver.get()) != GSL_SUCCESS) break;
      const double tol = 1e-9 * std::max(1.0, std::abs(solver->f));
      if (gsl_multimin_test_gradient(solver->gradient, tol) == GSL_SUCCESS) {
        best.converged = true;
        break;
      }
    }
    const double value = -solver->f;
    if (std::isfinite(value) && value >= best.value) {
      best.value = value;
      best.x.assign(solver->x->data, solver->x->data + dim);
    }
    const double tol = 1e-9 * std::max(1.0, std::abs(best.value));
    std::vector<double> grad(dim);
    fn(best.x.data(), grad.data());
    double gmax = 0.0;
    for (double g : grad) gmax = std::max(gmax, std::abs(g));
    best.converged = gmax < tol;
    if (!best.converged && best.value - entry < 1e-13 * std::max(1.0, std::abs(best.value)) && attempt > 0) break;
  }
  return best;
}

std::vector<double> beta_start(const ModelParams& p, double level) {
  std::vector<double> x(7);
  for (std::size_t k = 0; k < 5; ++k) x[k] = p.beta.cos_coeffs[k];
  const double floor = std::max(1e-3 * level, kMinLogInput);
  x[5] = std::log(std::max(p.beta.peak_amp, floor));
  x[6] = std::log(std::max(p.beta.peak_sigma, 0.5));
  return x;
}

}  // namespace

ParamVector to_optimizer_coords(const ModelParams& p) {
  ParamVector x = to_vector(p);
  x[0] = std::log(std::max(p.alpha.amp, kMinLogInput));
  x[1] = std::log(std::max(p.alpha.sigma, kMinLogInput));
  x[7] = std::log(std::max(p.beta.peak_amp, kMinLogInput));
  x[8] = std::log(std::max(p.beta.peak_sigma, kMinLogInput));
  return x;
}

ModelParams from_optimizer_coords(const ParamVector& x, int n) {
  ParamVector v = x;
  v[0] = std::exp(x[0]);
  v[1] = std::exp(x[1]);
  v[7] = std::exp(x[7]);
  v[8] = std::exp(x[8]);
  return from_vector(v, n);
}

double optimizer_objective(const RankHistograms& h, const ParamVector& x, ParamVector* grad) {
  const ObjectiveTables tables(h);
  std::array<double, 2> ga{};
  std::array<double, 7> gb{};
  const double f = tables.alpha_block(x.data(), grad ? ga.data() : nullptr) +
                   tables.beta_block(x.data() + 2, grad ? gb.data() : nullptr);
  if (grad != nullptr) {
    std::copy(ga.begin(), ga.end(), grad->begin());
    std::copy(gb.begin(), gb.end(), grad->begin() + 2);
  }
  return f;
}

MStepResult mstep(const RankHistograms& h, const ModelParams& init, std::uint64_t seed, int beta_restarts) {
  if (h.n != init.n) throw std::invalid_argument("histogram size does not match params");
  validate(init);
  const ObjectiveTables tables(h);
  const int n = init.n;

  MStepResult result;
  result.objective_before = expected_log_likelihood(h, init);

  const BlockFn alpha_fn = [&tables](const double* x, double* g) { return tables.alpha_block(x, g); };
  const BlockFn beta_fn = [&tables](const double* x, double* g) { return tables.beta_block(x, g); };

  const ParamVector x0 = to_optimizer_coords(init);
  BlockOutcome alpha = maximize(alpha_fn, {x0[0], x0[1]});

  const double level = tables.beta_level();
  BlockOutcome beta = maximize(beta_fn, beta_start(init, level));
  Rng rng(derive_seed(seed, "mstep-beta"));
  std::normal_distribution<double> normal;
  double cscale = std::sqrt(std::max(level, kMinLogInput));
  for (double c : init.beta.cos_coeffs) cscale = std::max(cscale, std::abs(c));
  for (int r = 0; r < beta_restarts; ++r) {
    std::vector<double> x = beta_start(init, level);
    for (std::size_t k = 0; k < 5; ++k) x[k] += 0.3 * cscale * normal(rng);
    x[5] += normal(rng);
    x[6] += 0.3 * normal(rng);
    BlockOutcome candidate = maximize(beta_fn, std::move(x));
    if (candidate.value > beta.value) beta = std::move(candidate);
  }

  ParamVector x{};
  x[0] = alpha.x[0];
  x[1] = alpha.x[1];
  std::copy(beta.x.begin(), beta.x.end(), x.begin() + 2);
  if (x[2] < 0.0) {
    for (std::size_t k = 2; k < 7; ++k) x[k] = -x[k];
  }
  result.params = from_optimizer_coords(x, n);
  result.optimizer_converged = alpha.converged && beta.converged;

  bool usable = true;
  try {
    validate(result.params);
    result.objective_after = expected_log_likelihood(h, result.params);
    usable = std::isfinite(result.objective_after);
  } catch (const std::invalid_argument&) {
    usable = false;
  }
  if (!usable || result.objective_after < result.objective_before) {
    result.params = init;
    result.objective_after = result.objective_before;
    if (!usable) result.optimizer_converged = false;
  }
  return result;
}

}  // namespace statusrank
