#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <deque>
#include <limits>

#include "core/bpdn.hpp"
#include "core/error.hpp"

namespace spdl {

namespace {

double thread_cpu_seconds() {
  timespec ts{};
  clock_gettime(CLOCK_THREAD_CPUTIME_ID, &ts);
  return static_cast<double>(ts.tv_sec) + 1e-9 * static_cast<double>(ts.tv_nsec);
}

struct Point {
  Vector x;
  Vector r;  // Dx - p
  Vector g;  // D^T r, empty until requested
  double f = 0.0;
  double l1 = 0.0;
  double F = 0.0;
};

enum class Step { Continue, Converged, Halt };

void validate(const BpdnProblem& prob, const SolverConfig& cfg) {
  const auto& mp = cfg.params;
  auto check = [](bool ok, const char* what) {
    if (!ok) fail(ErrorKind::Config, what);
  };
  check(cfg.eps_rel > 0.0, "solver: eps_rel must be positive");
  check(cfg.max_iter >= 1, "solver: max_iter must be >= 1");
  check(cfg.data_residual_tol >= 0.0, "solver: data_residual_tol must be >= 0");
  check(!cfg.x0 || cfg.x0->size() == prob.code_length(), "solver: x0 has wrong length");
  check(mp.bb_min > 0.0 && mp.bb_min <= mp.bb_max, "solver: bad BB clamp");
  switch (cfg.method) {
    case Method::FpcBb:
      check(mp.fpc_eta > 0.0 && mp.fpc_eta < 1.0, "FPC-BB: eta must lie in (0,1)");
      check(mp.fpc_mu0_factor > 0.0, "FPC-BB: mu0 factor must be positive");
      break;
    case Method::Twist:
      check(mp.twist_c > 0.0, "TwIST: c must be positive");
      check(mp.twist_alpha > 0.0 && mp.twist_alpha < 2.0, "TwIST: requires 0 < alpha < 2");
      check(mp.twist_beta > 0.0 && mp.twist_beta < mp.twist_c * mp.twist_alpha, "TwIST: requires 0 < beta < c*alpha");
      break;
    case Method::Sparsa:
      check(mp.sparsa_window >= 1, "SpaRSA: window must be >= 1");
      check(mp.sparsa_sigma > 0.0 && mp.sparsa_sigma < 1.0, "SpaRSA: sigma must lie in (0,1)");
      check(mp.sparsa_contraction > 0.0 && mp.sparsa_contraction < 1.0, "SpaRSA: contraction must lie in (0,1)");
      break;
    case Method::Gscg:
      check(mp.gscg_sigma > 0.0, "GSCG: sigma must be positive");
      check(mp.gscg_gamma >= 0.0 && mp.gscg_gamma <= 1.0, "GSCG: gamma must lie in [0,1]");
      break;
    case Method::Isga:
      check(mp.isga_c1 > 0.0 && mp.isga_c1 < mp.isga_c2 && mp.isga_c2 < 1.0, "ISGA: requires 0 < c1 < c2 < 1");
      break;
    default:
      break;
  }
}

// Shared bookkeeping: evaluation, stopping rule, history, timing.
class Run {
 public:
  Run(const BpdnProblem& prob, const SolverConfig& cfg)
      : prob_(prob), cfg_(cfg), D_(prob.dict()), mu_(prob.mu()), L_(prob.lipschitz()) {
    validate(prob, cfg);
    wall0_ = std::chrono::steady_clock::now();
    cpu0_ = thread_cpu_seconds();
    dtp_ = D_.transpose() * prob.patch();
    patch_norm_ = prob.patch().norm();
  }

  double mu() const { return mu_; }
  double L() const { return L_; }
  const Matrix& D() const { return D_; }
  StepClamp clamp() const { return {cfg_.params.bb_min, cfg_.params.bb_max}; }
  const MethodParams& params() const { return cfg_.params; }
  double dtp_inf() const { return dtp_.lpNorm<Eigen::Infinity>(); }

  // Zero is optimal iff |D^T p|_inf <= mu.
  bool zero_is_optimal() const { return dtp_inf() <= mu_; }

  SparseCode zero_result() {
    Point z = eval(Vector::Zero(prob_.code_length()));
    if (cfg_.record_history) history_.push_back(z.F);
    stop_ = StopReason::ZeroOptimal;
    return finish(z);
  }

  Vector initial_point() const {
    if (cfg_.x0) return *cfg_.x0;
    return Vector::Constant(prob_.code_length(), dtp_inf());
  }

  Point eval(Vector x, bool with_grad = true) const {
    Point p;
    p.x = std::move(x);
    p.r.noalias() = D_ * p.x;
    p.r -= prob_.patch();
    fill_value(p, mu_);
    if (with_grad) ensure_grad(p);
    return p;
  }

  // Point at x + alpha*d given precomputed D*d.
  Point along(const Point& base, const Vector& d, const Vector& Dd, double alpha) const {
    Point p;
    p.x = base.x + alpha * d;
    p.r = base.r + alpha * Dd;
    fill_value(p, mu_);
    return p;
  }

  void ensure_grad(Point& p) const {
    if (p.g.size() == 0) p.g.noalias() = D_.transpose() * p.r;
  }

  void begin(const Point& x0) {
    check_finite(x0);
    if (cfg_.record_history) history_.push_back(x0.F);
  }

  void record_step(double alpha) {
    if (cfg_.record_history) steps_.push_back(alpha);
  }

  // Accepts `next` as the new iterate. With `certify`, a small iterate change only ends the solve
  // when the fixed-point residual confirms it; otherwise `stage_tol` ends a continuation stage.
  Step advance(const Point& prev, Point& next, bool certify = true, double stage_tol = 0.0) {
    check_finite(next);
    ++iterations_;
    if (cfg_.record_history) history_.push_back(next.F);

    const double change = (next.x - prev.x).norm();
    const double scale = prev.x.norm();
    if (certify) {
      if (change <= cfg_.eps_rel * scale) {
        ensure_grad(next);
        const double res = residual(next);
        if (res <= 10.0 * cfg_.eps_rel * (1.0 + next.x.lpNorm<Eigen::Infinity>())) {
          stop_ = StopReason::IterateChange;
          return Step::Converged;
        }
      }
    } else if (change <= stage_tol * scale) {
      return Step::Converged;
    }
    if (cfg_.data_residual_tol > 0.0 && next.r.norm() <= cfg_.data_residual_tol * patch_norm_) {
      stop_ = StopReason::DataResidual;
      return Step::Halt;
    }
    if (iterations_ >= cfg_.max_iter) {
      stop_ = StopReason::MaxIter;
      return Step::Halt;
    }
    return Step::Continue;
  }

  SparseCode finish(Point& last, int stages = 1) {
    ensure_grad(last);
    SparseCode out;
    out.x = last.x;
    out.iterations = iterations_;
    out.objective = last.F;
    out.fixed_point_residual = residual(last);
    out.stop = stop_;
    out.converged = stop_ == StopReason::IterateChange || stop_ == StopReason::ZeroOptimal;
    out.stages = stages;
    out.history = std::move(history_);
    out.steps = std::move(steps_);
    out.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0_).count();
    out.cpu_time = thread_cpu_seconds() - cpu0_;
    return out;
  }

  double residual(const Point& p) const {
    const double tau = 1.0 / L_;
    return (shrink(p.x - tau * p.g, mu_ * tau) - p.x).lpNorm<Eigen::Infinity>();
  }

  static void fill_value(Point& p, double mu) {
    p.f = 0.5 * p.r.squaredNorm();
    p.l1 = p.x.lpNorm<1>();
    p.F = p.f + mu * p.l1;
  }

 private:
  void check_finite(const Point& p) const {
    if (!std::isfinite(p.F)) fail(ErrorKind::Divergence, "solver diverged: non-finite objective");
  }

  const BpdnProblem& prob_;
  const SolverConfig& cfg_;
  const Matrix& D_;
  double mu_;
  double L_;
  Vector dtp_;
  double patch_norm_ = 0.0;
  std::uint64_t iterations_ = 0;
  StopReason stop_ = StopReason::MaxIter;
  std::vector<double> history_;
  std::vector<double> steps_;
  std::chrono::steady_clock::time_point wall0_;
  double cpu0_ = 0.0;
};

// Composite model decrease along d: grad f^T d + mu (|x + d|_1 - |x|_1).
double model_decrease(const Point& p, const Vector& d, double mu) {
  return p.g.dot(d) + mu * ((p.x + d).lpNorm<1>() - p.l1);
}

// Plain Armijo backtracking on the composite objective. Returns 0 when no step is found.
double armijo(const Run& run, const Point& cur, const Vector& d, const Vector& Dd, double delta,
              double mu_eval, double ref) {
  double alpha = 1.0;
  for (int i = 0; i < 60; ++i) {
    const Point trial = run.along(cur, d, Dd, alpha);
    if (trial.f + mu_eval * trial.l1 <= ref + 1e-4 * alpha * delta) return alpha;
    alpha *= 0.5;
  }
  return 0.0;
}

}  // namespace

SparseCode solve_ista(const BpdnProblem& prob, const SolverConfig& cfg) {
  Run run(prob, cfg);
  if (run.zero_is_optimal()) return run.zero_result();
  const double tau = 1.0 / run.L();
  const double thresh = run.mu() * tau;

  Point cur = run.eval(run.initial_point());
  run.begin(cur);
  for (;;) {
    Point next = run.eval(shrink(cur.x - tau * cur.g, thresh));
    const Step step = run.advance(cur, next);
    cur = std::move(next);
    if (step != Step::Continue) break;
  }
  return run.finish(cur);
}

SparseCode solve_fista(const BpdnProblem& prob, const SolverConfig& cfg) {
  Run run(prob, cfg);
  if (run.zero_is_optimal()) return run.zero_result();
  const double tau = 1.0 / run.L();
  const double thresh = run.mu() * tau;

  Point cur = run.eval(run.initial_point(), false);
  run.begin(cur);
  Vector y = cur.x;
  Vector ry = cur.r;  // D y - p, carried by linearity
  double t = 1.0;
  for (;;) {
    const Vector gy = run.D().transpose() * ry;
    Point next = run.eval(shrink(y - tau * gy, thresh), false);
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    const double beta = (t - 1.0) / t_next;
    y = next.x + beta * (next.x - cur.x);
    ry = next.r + beta * (next.r - cur.r);
    t = t_next;
    const Step step = run.advance(cur, next);
    cur = std::move(next);
    if (step != Step::Continue) break;
  }
  return run.finish(cur);
}

SparseCode solve_fpc_bb(const BpdnProblem& prob, const SolverConfig& cfg) {
  Run run(prob, cfg);
  if (run.zero_is_optimal()) return run.zero_result();
  const auto& mp = run.params();
  const double mu = run.mu();
  double mu_bar = std::max(mu, mp.fpc_mu0_factor * run.dtp_inf());
  const double stage_tol = std::max(cfg.eps_rel, 1e-3);

  Point cur = run.eval(run.initial_point());
  run.begin(cur);
  double tau = 1.0 / run.L();
  int stages = 1;
  for (;;) {
    const bool final_stage = mu_bar <= mu;
    std::deque<double> window{cur.f + mu_bar * cur.l1};
    Step step = Step::Continue;
    while (step == Step::Continue) {
      Vector d = shrink(cur.x - tau * cur.g, mu_bar * tau) - cur.x;
      Vector Dd = run.D() * d;
      double delta = model_decrease(cur, d, mu_bar);
      const double ref = *std::max_element(window.begin(), window.end());
      double alpha = delta < 0.0 ? armijo(run, cur, d, Dd, delta, mu_bar, ref) : 0.0;
      if (alpha == 0.0) {
        // Safe fallback: proximal step with 1/L always decreases the stage objective.
        d = shrink(cur.x - cur.g / run.L(), mu_bar / run.L()) - cur.x;
        Dd = run.D() * d;
        alpha = 1.0;
      }
      Point next = run.along(cur, d, Dd, alpha);
      run.ensure_grad(next);
      run.record_step(alpha);
      tau = bb_steplength(next.x - cur.x, next.g - cur.g, run.clamp());
      step = run.advance(cur, next, final_stage, stage_tol);
      cur = std::move(next);
      window.push_back(cur.f + mu_bar * cur.l1);
      if (window.size() > 5) window.pop_front();
    }
    if (step == Step::Halt || final_stage) break;
    mu_bar = std::max(mu, mu_bar * mp.fpc_eta);
    ++stages;
  }
  return run.finish(cur, stages);
}

SparseCode solve_twist(const BpdnProblem& prob, const SolverConfig& cfg) {
  Run run(prob, cfg);
  if (run.zero_is_optimal()) return run.zero_result();
  const auto& mp = run.params();
  const double tau = 1.0 / run.L();
  const double thresh = run.mu() * tau;
  const double a = mp.twist_alpha;
  const double b = mp.twist_beta;

  Point cur = run.eval(run.initial_point());
  run.begin(cur);
  Vector older = cur.x;
  bool first = true;
  for (;;) {
    Vector ist = shrink(cur.x - tau * cur.g, thresh);
    Point next;
    if (first) {
      next = run.eval(std::move(ist));
      first = false;
    } else {
      next = run.eval((1.0 - a) * older + (a - b) * cur.x + b * ist);
      if (next.F > cur.F) next = run.eval(std::move(ist));  // monotone safeguard
    }
    older = cur.x;
    const Step step = run.advance(cur, next);
    cur = std::move(next);
    if (step != Step::Continue) break;
  }
  return run.finish(cur);
}

SparseCode solve_sparsa(const BpdnProblem& prob, const SolverConfig& cfg) {
  Run run(prob, cfg);
  if (run.zero_is_optimal()) return run.zero_result();
  const auto& mp = run.params();
  const double mu = run.mu();

  Point cur = run.eval(run.initial_point());
  run.begin(cur);
  std::deque<double> window{cur.F};
  double tau = 1.0 / run.L();
  for (;;) {
    const double ref = *std::max_element(window.begin(), window.end());
    Point next;
    bool accepted = false;
    for (int tries = 0; tries <= 100; ++tries) {
      next = run.eval(shrink(cur.x - tau * cur.g, mu * tau), false);
      if (next.F <= ref - 0.5 * mp.sparsa_sigma / tau * (next.x - cur.x).squaredNorm()) {
        accepted = true;
        break;
      }
      tau *= mp.sparsa_contraction;
    }
    if (!accepted) fail(ErrorKind::Stagnation, "SpaRSA: backtracking exhausted");
    run.ensure_grad(next);
    run.record_step(tau);
    tau = bb_steplength(next.x - cur.x, next.g - cur.g, run.clamp());
    const Step step = run.advance(cur, next);
    cur = std::move(next);
    window.push_back(cur.F);
    if (window.size() > static_cast<std::size_t>(mp.sparsa_window)) window.pop_front();
    if (step != Step::Continue) break;
  }
  return run.finish(cur);
}

SparseCode solve_gscg(const BpdnProblem& prob, const SolverConfig& cfg) {
  Run run(prob, cfg);
  if (run.zero_is_optimal()) return run.zero_result();
  const auto& mp = run.params();
  const double mu = run.mu();

  Point cur = run.eval(run.initial_point());
  run.begin(cur);
  double tau = 1.0 / run.L();
  Vector d_prev;
  Vector dir_prev;
  for (;;) {
    const Vector d = shrink(cur.x - tau * cur.g, mu * tau) - cur.x;
    Vector dir = d;
    double alpha = 0.0;
    Vector Ddir;
    if (d_prev.size() > 0 && d_prev.squaredNorm() > 0.0) {
      const double beta = std::max(0.0, d.dot(d - d_prev) / d_prev.squaredNorm());
      Vector hybrid = d + beta * dir_prev;
      const double delta = model_decrease(cur, hybrid, mu);
      if (cur.g.dot(hybrid) <= -mp.gscg_sigma * hybrid.squaredNorm() && delta < 0.0) {
        Vector Dh = run.D() * hybrid;
        alpha = armijo(run, cur, hybrid, Dh, delta, mu, cur.F);
        if (alpha > 0.0) {
          dir = std::move(hybrid);
          Ddir = std::move(Dh);
        }
      }
    }
    if (alpha == 0.0) {
      // Restart from the shrinkage direction.
      dir = d;
      Ddir = run.D() * dir;
      const double delta = model_decrease(cur, dir, mu);
      if (delta < 0.0) alpha = armijo(run, cur, dir, Ddir, delta, mu, cur.F);
      if (alpha == 0.0) {
        dir = shrink(cur.x - cur.g / run.L(), mu / run.L()) - cur.x;
        Ddir = run.D() * dir;
        alpha = 1.0;
      }
    }
    Point next = run.along(cur, dir, Ddir, alpha);
    run.ensure_grad(next);
    run.record_step(alpha);
    const double tau_bb = bb_steplength(next.x - cur.x, next.g - cur.g, run.clamp());
    tau = mp.gscg_gamma * tau_bb + (1.0 - mp.gscg_gamma) * tau;
    d_prev = d;
    dir_prev = std::move(dir);
    const Step step = run.advance(cur, next);
    cur = std::move(next);
    if (step != Step::Continue) break;
  }
  return run.finish(cur);
}

SparseCode solve_isga(const BpdnProblem& prob, const SolverConfig& cfg) {
  Run run(prob, cfg);
  if (run.zero_is_optimal()) return run.zero_result();
  const auto& mp = run.params();
  const double mu = run.mu();
  const double inf = std::numeric_limits<double>::infinity();

  Point cur = run.eval(run.initial_point());
  run.begin(cur);
  double tau = 1.0 / run.L();
  for (;;) {
    Vector d = shrink(cur.x - tau * cur.g, mu * tau) - cur.x;
    Vector Dd = run.D() * d;
    double delta = model_decrease(cur, d, mu);
    double alpha = 1.0;
    // Below this the objective differences the bracket compares are pure rounding.
    const double floor = 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(cur.F));
    if (d.squaredNorm() == 0.0) {
      alpha = 0.0;
    } else if (!(delta < -floor)) {
      // Rounding ate the model decrease; take the guaranteed-descent 1/L step.
      d = shrink(cur.x - cur.g / run.L(), mu / run.L()) - cur.x;
      Dd = run.D() * d;
    } else {
      // Goldstein bracket: c2*a*delta <= F(x + a d) - F(x) <= c1*a*delta.
      double lo = 0.0;
      double hi = inf;
      double armijo_ok = 0.0;
      bool found = false;
      for (int trial = 0; trial < 100; ++trial) {
        const double phi = run.along(cur, d, Dd, alpha).F - cur.F;
        if (phi > mp.isga_c1 * alpha * delta) {
          hi = alpha;
          alpha = 0.5 * (lo + hi);
        } else if (phi < mp.isga_c2 * alpha * delta) {
          armijo_ok = alpha;
          lo = alpha;
          alpha = std::isinf(hi) ? 2.0 * alpha : 0.5 * (lo + hi);
        } else {
          found = true;
          break;
        }
      }
      if (!found) {
        if (armijo_ok == 0.0) fail(ErrorKind::Stagnation, "ISGA: Goldstein line search exhausted");
        alpha = armijo_ok;
      }
    }
    Point next = run.along(cur, d, Dd, alpha);
    run.ensure_grad(next);
    run.record_step(alpha);
    tau = bb_steplength(next.x - cur.x, next.g - cur.g, run.clamp());
    const Step step = run.advance(cur, next);
    cur = std::move(next);
    if (step != Step::Continue) break;
  }
  return run.finish(cur);
}

}  // namespace spdl
