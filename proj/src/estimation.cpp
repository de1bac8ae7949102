#include "sleephmm/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "sleephmm/detail/hmm_core.hpp"
#include "sleephmm/transition.hpp"

namespace sleephmm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double logit(double p) { return std::log(p) - std::log1p(-p); }

void check_interior(double p, const char* name) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::domain_error(std::string("transform: ") + name +
                            " must lie strictly inside (0, 1)");
  }
}

void check_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw std::domain_error(std::string("transform: ") + name + " must be positive and finite");
  }
}

}  // namespace

const std::array<std::string, 13>& param_names() {
  static const std::array<std::string, 13> names = {
      "mu0", "mu1", "s0", "s1", "pi0", "pi1", "delta1",
      "alpha0", "alpha1", "alpha2", "beta0", "beta1", "beta2"};
  return names;
}

TransformedParams transform(const ModelParams& params) {
  const EmissionParams& e = params.emission;
  check_positive(e.mu0, "mu0");
  check_positive(e.mu1, "mu1");
  check_positive(e.s0, "s0");
  check_positive(e.s1, "s1");
  check_interior(e.pi0, "pi0");
  check_interior(e.pi1, "pi1");
  check_interior(params.delta1, "delta1");
  params.trans.validate();
  TransformedParams tp;
  tp.v = {std::log(e.mu0),      std::log(e.mu1),      std::log(e.s0),
          std::log(e.s1),       logit(e.pi0),         logit(e.pi1),
          logit(params.delta1), params.trans.alpha[0], params.trans.alpha[1],
          params.trans.alpha[2], params.trans.beta[0], params.trans.beta[1],
          params.trans.beta[2]};
  return tp;
}

ModelParams inverse_transform(const TransformedParams& tp) {
  ModelParams p;
  p.emission.mu0 = std::exp(tp.v[0]);
  p.emission.mu1 = std::exp(tp.v[1]);
  p.emission.s0 = std::exp(tp.v[2]);
  p.emission.s1 = std::exp(tp.v[3]);
  p.emission.pi0 = expit_stable(tp.v[4]);
  p.emission.pi1 = expit_stable(tp.v[5]);
  p.delta1 = expit_stable(tp.v[6]);
  p.trans.alpha = {tp.v[7], tp.v[8], tp.v[9]};
  p.trans.beta = {tp.v[10], tp.v[11], tp.v[12]};
  return p;
}

namespace {

// ---- packing: full 13-vector <-> optimizer vector (12 when delta fixed) ----

int packed_size(bool fix_delta) { return fix_delta ? 12 : 13; }

Eigen::VectorXd pack(const TransformedParams& tp, bool fix_delta) {
  Eigen::VectorXd x(packed_size(fix_delta));
  int k = 0;
  for (int i = 0; i < kNumParams; ++i) {
    if (fix_delta && i == 6) continue;
    x[k++] = tp.v[i];
  }
  return x;
}

TransformedParams unpack(const Eigen::VectorXd& x, bool fix_delta, double delta_logit) {
  TransformedParams tp;
  int k = 0;
  for (int i = 0; i < kNumParams; ++i) {
    if (fix_delta && i == 6) {
      tp.v[6] = delta_logit;
      continue;
    }
    tp.v[i] = x[k++];
  }
  return tp;
}

// Negative log-likelihood over the packed unconstrained vector. Bernoulli
// and initial-state log-probabilities are taken directly from the logits
// (log_expit), so the objective stays finite even when the optimizer walks
// a probability arbitrarily close to its boundary. Size parameters are
// capped at kSizeCap: the likelihood is flat above the cap by construction.
class NegLogLik {
 public:
  NegLogLik(const ObservationSeries& series, bool fix_delta, double fixed_delta1)
      : series_(series), fix_delta_(fix_delta) {
    if (fix_delta) {
      if (!(fixed_delta1 >= 0.0 && fixed_delta1 <= 1.0)) {
        throw std::invalid_argument("fit: fix_delta1 must lie in [0, 1]");
      }
      fixed_log_delta1_ = std::log(fixed_delta1);
      fixed_log_delta0_ = std::log1p(-fixed_delta1);
    }
  }

  double operator()(const Eigen::VectorXd& x) const {
    const TransformedParams tp = unpack(x, fix_delta_, 0.0);
    const double mu0 = std::exp(tp.v[0]);
    const double mu1 = std::exp(tp.v[1]);
    const double s0 = std::min(std::exp(tp.v[2]), kSizeCap);
    const double s1 = std::min(std::exp(tp.v[3]), kSizeCap);
    if (!std::isfinite(mu0) || !std::isfinite(mu1) || mu0 <= 0.0 || mu1 <= 0.0 || s0 <= 0.0 ||
        s1 <= 0.0) {
      return kInf;
    }
    detail::ReportLogProbs reports{log_expit(tp.v[4]), log_expit(-tp.v[4]), log_expit(tp.v[5]),
                                   log_expit(-tp.v[5])};
    double ld0, ld1;
    if (fix_delta_) {
      ld0 = fixed_log_delta0_;
      ld1 = fixed_log_delta1_;
    } else {
      ld1 = log_expit(tp.v[6]);
      ld0 = log_expit(-tp.v[6]);
    }
    TransitionCoeffs coeffs;
    coeffs.alpha = {tp.v[7], tp.v[8], tp.v[9]};
    coeffs.beta = {tp.v[10], tp.v[11], tp.v[12]};
    for (double c : coeffs.alpha) {
      if (!std::isfinite(c)) return kInf;
    }
    for (double c : coeffs.beta) {
      if (!std::isfinite(c)) return kInf;
    }
    const auto model =
        detail::build_log_model(series_, mu0, s0, mu1, s1, reports, ld0, ld1, coeffs);
    const double ll = detail::forward_pass(model, nullptr);
    return std::isfinite(ll) ? -ll : kInf;
  }

 private:
  const ObservationSeries& series_;
  bool fix_delta_;
  double fixed_log_delta0_ = 0.0;
  double fixed_log_delta1_ = 0.0;
};

Eigen::VectorXd central_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                                 const Eigen::VectorXd& x, double step_scale) {
  const int n = static_cast<int>(x.size());
  Eigen::VectorXd g(n);
  Eigen::VectorXd xp = x;
  for (int i = 0; i < n; ++i) {
    const double h = step_scale * std::max(1.0, std::abs(x[i]));
    const double xi = x[i];
    xp[i] = xi + h;
    const double fp = f(xp);
    xp[i] = xi - h;
    const double fm = f(xp);
    xp[i] = xi;
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

struct BfgsOutcome {
  Eigen::VectorXd x;
  double f = kInf;
  int iterations = 0;
  bool converged = false;
  std::string reason;
  double gradient_sup = kInf;
};

// BFGS with backtracking Armijo line search on the inverse Hessian
// approximation; converges on gradient sup-norm, step sup-norm, or stalled
// objective with an already-small gradient.
BfgsOutcome bfgs_minimize(const std::function<double(const Eigen::VectorXd&)>& f,
                          Eigen::VectorXd x0, const FitConfig& cfg) {
  const int n = static_cast<int>(x0.size());
  BfgsOutcome out;
  out.x = std::move(x0);
  out.f = f(out.x);
  if (!std::isfinite(out.f)) {
    out.reason = "objective not finite at start";
    return out;
  }

  Eigen::MatrixXd h_inv = Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd g = central_gradient(f, out.x, cfg.fd_step_scale);
  bool scaled = false;
  int stalled = 0;
  constexpr double kArmijo = 1e-4;

  for (int iter = 1; iter <= cfg.max_iterations; ++iter) {
    out.iterations = iter;
    out.gradient_sup = g.lpNorm<Eigen::Infinity>();
    if (out.gradient_sup <= cfg.gradient_tolerance) {
      out.converged = true;
      out.reason = "gradient tolerance";
      return out;
    }

    Eigen::VectorXd d = -(h_inv * g);
    double slope = d.dot(g);
    if (!(slope < 0.0)) {  // not a descent direction: reset curvature
      h_inv.setIdentity();
      d = -g;
      slope = d.dot(g);
    }

    // Backtracking line search; stop once the trial step falls below the
    // step tolerance (no representable progress remains).
    const double d_sup = d.lpNorm<Eigen::Infinity>();
    double step = 1.0;
    double f_new = kInf;
    bool accepted = false;
    while (step * d_sup > 0.25 * cfg.step_tolerance) {
      f_new = f(out.x + step * d);
      if (std::isfinite(f_new) && f_new <= out.f + kArmijo * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      out.converged = true;
      out.reason = "step tolerance (line search exhausted)";
      return out;
    }

    const Eigen::VectorXd s = step * d;
    const Eigen::VectorXd x_new = out.x + s;
    const Eigen::VectorXd g_new = central_gradient(f, x_new, cfg.fd_step_scale);
    const Eigen::VectorXd y = g_new - g;

    const double improvement = out.f - f_new;
    out.x = x_new;
    out.f = f_new;
    g = g_new;

    if (s.lpNorm<Eigen::Infinity>() <= cfg.step_tolerance) {
      out.gradient_sup = g.lpNorm<Eigen::Infinity>();
      out.converged = true;
      out.reason = "step tolerance";
      return out;
    }
    if (improvement <= cfg.rel_ftol * (std::abs(out.f) + 1.0) &&
        g.lpNorm<Eigen::Infinity>() <= 1e-2) {
      if (++stalled >= 2) {
        out.gradient_sup = g.lpNorm<Eigen::Infinity>();
        out.converged = true;
        out.reason = "function tolerance";
        return out;
      }
    } else {
      stalled = 0;
    }

    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      if (!scaled) {
        // Shanno-Phua scaling before the first update fixes the step scale.
        h_inv *= sy / y.dot(y);
        scaled = true;
      }
      const double rho = 1.0 / sy;
      const Eigen::VectorXd hy = h_inv * y;
      // H <- (I - rho s y') H (I - rho y s') + rho s s'
      h_inv.noalias() -= rho * (s * hy.transpose() + hy * s.transpose());
      h_inv.noalias() += rho * rho * (y.dot(hy)) * (s * s.transpose());
      h_inv.noalias() += rho * (s * s.transpose());
    }
  }
  out.gradient_sup = g.lpNorm<Eigen::Infinity>();
  out.reason = "max iterations reached";
  return out;
}

// Names the first non-finite emission factor for the start-value error.
std::string diagnose_nonfinite_start(const ObservationSeries& series, const ModelParams& params) {
  const auto model = detail::build_log_model(series, params);
  for (std::size_t t = 0; t < model.T; ++t) {
    for (int s = 0; s < 2; ++s) {
      const double v = model.loge(t, s);
      if (std::isnan(v) || v == kInf) {
        return "emission log-probability at minute " + std::to_string(t) + ", state " +
               std::to_string(s);
      }
    }
  }
  return "initial-state or transition term";
}

}  // namespace

ModelParams starting_values(const ObservationSeries& series) {
  series.validate();
  const std::size_t T = series.length();

  const auto in_window = [&](std::size_t t, int lo, int hi) {
    const int mod = static_cast<int>((series.start_phase + t) % kMinutesPerDay);
    return mod >= lo && mod < hi;
  };

  struct WindowStats {
    double mean = 0.0, var = 0.0;
    std::size_t n_counts = 0;
    std::size_t reports_present = 0, reports_one = 0;
  };
  // night 1:00-5:59am; afternoon 1:00-5:59pm
  const auto collect = [&](int lo, int hi, const char* label) {
    WindowStats w;
    double sum = 0.0, sum_sq = 0.0;
    for (std::size_t t = 0; t < T; ++t) {
      if (!in_window(t, lo, hi)) continue;
      const Count y = series.activity[t];
      if (y != kMissingCount) {
        sum += y;
        sum_sq += static_cast<double>(y) * y;
        ++w.n_counts;
      }
      const Report x = series.self_report[t];
      if (x != kMissingReport) {
        ++w.reports_present;
        if (x == 1) ++w.reports_one;
      }
    }
    if (w.n_counts < 2) {
      throw std::runtime_error(std::string("starting_values: ") + label +
                               " window contains fewer than two activity observations");
    }
    w.mean = sum / static_cast<double>(w.n_counts);
    w.var = (sum_sq - sum * w.mean) / static_cast<double>(w.n_counts - 1);
    return w;
  };

  const WindowStats night = collect(60, 360, "night (1am-6am)");
  const WindowStats afternoon = collect(780, 1080, "afternoon (1pm-6pm)");

  const auto moment_mu = [](const WindowStats& w) { return std::max(w.mean, 1e-3); };
  const auto moment_s = [&](const WindowStats& w) {
    const double mu = moment_mu(w);
    if (w.var <= mu) return kSizeCap;  // at or under Poisson dispersion
    return std::clamp(mu * mu / (w.var - mu), 1e-4, kSizeCap);
  };
  const auto report_fraction = [](const WindowStats& w, double fallback) {
    if (w.reports_present == 0) return fallback;
    const double f =
        static_cast<double>(w.reports_one) / static_cast<double>(w.reports_present);
    return std::clamp(f, 0.01, 0.99);
  };

  ModelParams start;
  start.emission.mu1 = moment_mu(night);
  start.emission.s1 = moment_s(night);
  start.emission.mu0 = moment_mu(afternoon);
  start.emission.s0 = moment_s(afternoon);
  start.emission.pi1 = report_fraction(night, 0.9);
  start.emission.pi0 = report_fraction(afternoon, 0.1);
  start.trans.alpha = {8.0, -5.0, -3.0};
  start.trans.beta = {7.5, 4.0, 2.0};
  start.delta1 = series.start_phase == 0 ? 0.9 : 0.5;
  return start;
}

FitResult fit(const ObservationSeries& series, const FitConfig& config) {
  series.validate();
  const bool fix_delta = config.fix_delta1.has_value();
  const double fixed_delta1 = fix_delta ? *config.fix_delta1 : 0.0;

  ModelParams start = config.start ? *config.start : starting_values(series);
  if (fix_delta) start.delta1 = std::clamp(fixed_delta1, 1e-12, 1.0 - 1e-12);
  start.validate();

  const NegLogLik objective(series, fix_delta, fixed_delta1);
  const std::function<double(const Eigen::VectorXd&)> f = std::cref(objective);

  const Eigen::VectorXd x0 = pack(transform(start), fix_delta);
  const double f0 = objective(x0);
  if (!std::isfinite(f0)) {
    throw std::runtime_error("fit: log-likelihood is not finite at the starting values; " +
                             diagnose_nonfinite_start(series, start));
  }

  std::mt19937_64 jitter_rng(config.multistart_seed);
  std::uniform_real_distribution<double> jitter(-2.0, 2.0);

  BfgsOutcome best;
  int best_index = 0;
  for (int m = 0; m < std::max(1, config.multistart); ++m) {
    Eigen::VectorXd x = x0;
    if (m > 0) {
      // perturb the six transition coefficients (tail of the vector)
      const int n = static_cast<int>(x.size());
      for (int i = n - 6; i < n; ++i) x[i] += jitter(jitter_rng);
      if (!std::isfinite(objective(x))) continue;
    }
    BfgsOutcome run = bfgs_minimize(f, x, config);
    if (m == 0 || run.f < best.f) {
      best = std::move(run);
      best_index = m;
    }
  }

  FitResult result;
  result.fixed_delta1 = fix_delta;
  result.start = start;
  result.best_start_index = best_index;
  result.iterations = best.iterations;
  result.converged = best.converged;
  result.convergence_reason = best.reason;
  result.gradient_norm = best.gradient_sup;
  result.log_likelihood = -best.f;

  TransformedParams tp_hat =
      unpack(best.x, fix_delta, fix_delta ? logit(std::clamp(fixed_delta1, 1e-12, 1.0 - 1e-12))
                                          : 0.0);
  ModelParams hat = inverse_transform(tp_hat);
  if (fix_delta) hat.delta1 = fixed_delta1;
  if (hat.emission.s0 >= kSizeCap) {
    hat.emission.s0 = kSizeCap;
    result.size_cap_hit0 = true;
  }
  if (hat.emission.s1 >= kSizeCap) {
    hat.emission.s1 = kSizeCap;
    result.size_cap_hit1 = true;
  }
  result.params_hat = hat;

  if (config.compute_se && result.converged) {
    result.se_natural = standard_errors(series, hat, config);
  } else {
    const int n = packed_size(fix_delta);
    result.se_natural.se.assign(n, 0.0);
    result.se_natural.available.assign(n, false);
  }
  return result;
}

SeResult standard_errors(const ObservationSeries& series, const ModelParams& params_hat,
                         const FitConfig& config) {
  const bool fix_delta = config.fix_delta1.has_value();
  const NegLogLik objective(series, fix_delta, fix_delta ? *config.fix_delta1 : 0.0);

  ModelParams interior = params_hat;
  if (fix_delta) interior.delta1 = 0.5;  // placeholder; coordinate is dropped
  const Eigen::VectorXd x = pack(transform(interior), fix_delta);

  // Second derivatives want a larger step than first derivatives:
  // eps^(1/4)-scaled rather than the gradient's eps^(1/3).
  const double hessian_step = std::sqrt(config.fd_step_scale) * 0.02;
  const Eigen::MatrixXd hessian = detail::fd_hessian(std::cref(objective), x, hessian_step);

  const EmissionParams& e = params_hat.emission;
  Eigen::VectorXd link(packed_size(fix_delta));
  int k = 0;
  const std::array<double, 13> full_link = {
      e.mu0, e.mu1, e.s0, e.s1,
      e.pi0 * (1.0 - e.pi0), e.pi1 * (1.0 - e.pi1),
      params_hat.delta1 * (1.0 - params_hat.delta1),
      1.0, 1.0, 1.0, 1.0, 1.0, 1.0};
  for (int i = 0; i < kNumParams; ++i) {
    if (fix_delta && i == 6) continue;
    link[k++] = full_link[i];
  }
  return detail::se_from_hessian(hessian, link);
}

std::vector<double> fd_gradient(const ObservationSeries& series, const TransformedParams& tp,
                                double step_scale, std::optional<double> fix_delta1) {
  const bool fix_delta = fix_delta1.has_value();
  const NegLogLik objective(series, fix_delta, fix_delta ? *fix_delta1 : 0.0);
  const Eigen::VectorXd x = pack(tp, fix_delta);
  const Eigen::VectorXd g = central_gradient(std::cref(objective), x, step_scale);
  std::vector<double> grad(g.size());
  // negate: callers get the gradient of the log-likelihood itself
  for (int i = 0; i < g.size(); ++i) grad[static_cast<std::size_t>(i)] = -g[i];
  return grad;
}

namespace detail {

Eigen::MatrixXd fd_hessian(const std::function<double(const Eigen::VectorXd&)>& f,
                           const Eigen::VectorXd& x, double step_scale) {
  const int n = static_cast<int>(x.size());
  Eigen::VectorXd h(n);
  for (int i = 0; i < n; ++i) h[i] = step_scale * std::max(1.0, std::abs(x[i]));

  Eigen::MatrixXd hess(n, n);
  const double f0 = f(x);
  Eigen::VectorXd xp = x;
  for (int i = 0; i < n; ++i) {
    const double xi = x[i];
    xp[i] = xi + h[i];
    const double fp = f(xp);
    xp[i] = xi - h[i];
    const double fm = f(xp);
    xp[i] = xi;
    hess(i, i) = (fp - 2.0 * f0 + fm) / (h[i] * h[i]);
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double xi = x[i], xj = x[j];
      xp[i] = xi + h[i]; xp[j] = xj + h[j];
      const double fpp = f(xp);
      xp[j] = xj - h[j];
      const double fpm = f(xp);
      xp[i] = xi - h[i]; xp[j] = xj + h[j];
      const double fmp = f(xp);
      xp[j] = xj - h[j];
      const double fmm = f(xp);
      xp[i] = xi; xp[j] = xj;
      const double v = (fpp - fpm - fmp + fmm) / (4.0 * h[i] * h[j]);
      hess(i, j) = v;
      hess(j, i) = v;
    }
  }
  return hess;
}

SeResult se_from_hessian(const Eigen::MatrixXd& hessian, const Eigen::VectorXd& link_derivative) {
  const int n = static_cast<int>(hessian.rows());
  SeResult result;
  result.computed = true;
  result.se.assign(n, 0.0);
  result.available.assign(n, false);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(hessian);
  if (eig.info() != Eigen::Success) return result;
  const Eigen::VectorXd& lambda = eig.eigenvalues();
  const Eigen::MatrixXd& vec = eig.eigenvectors();

  const double lambda_max = lambda.cwiseAbs().maxCoeff();
  const double floor = std::max(lambda_max, 1.0) * 1e-12;
  result.hessian_pd = lambda.minCoeff() > floor;

  for (int i = 0; i < n; ++i) {
    double var = 0.0;
    double defective_weight = 0.0;
    for (int k = 0; k < n; ++k) {
      const double w = vec(i, k) * vec(i, k);
      if (lambda[k] > floor) {
        var += w / lambda[k];
      } else {
        defective_weight += w;
      }
    }
    if (defective_weight <= 1e-8) {
      result.se[static_cast<std::size_t>(i)] = std::sqrt(var) * std::abs(link_derivative[i]);
      result.available[static_cast<std::size_t>(i)] = true;
    }
  }
  return result;
}

}  // namespace detail

}  // namespace sleephmm
