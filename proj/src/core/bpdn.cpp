#include "core/bpdn.hpp"

#include <algorithm>
#include <cmath>

#include "core/error.hpp"

namespace spdl {

namespace {

void check_dims(const BpdnProblem& prob, const Vector& x) {
  if (x.size() != prob.code_length()) fail(ErrorKind::Argument, "code length does not match dictionary");
}

}  // namespace

BpdnProblem::BpdnProblem(const Matrix& dict, Vector patch, double mu, std::optional<double> lipschitz)
    : dict_(&dict), patch_(std::move(patch)), mu_(mu) {
  require(dict.rows() >= 1 && dict.cols() >= 1, ErrorKind::Argument, "bpdn: empty dictionary");
  require(patch_.size() == dict.rows(), ErrorKind::Argument, "bpdn: patch length does not match dictionary");
  require(mu > 0.0 && std::isfinite(mu), ErrorKind::Argument, "bpdn: mu must be positive");
  if (lipschitz) {
    require(*lipschitz > 0.0 && std::isfinite(*lipschitz), ErrorKind::Argument, "bpdn: bad Lipschitz constant");
    lipschitz_ = *lipschitz;
  } else {
    lipschitz_ = estimate_lipschitz(dict);
  }
}

std::string_view method_name(Method m) {
  switch (m) {
    case Method::Ista: return "ISTA";
    case Method::Fista: return "FISTA";
    case Method::FpcBb: return "FPC-BB";
    case Method::Twist: return "TwIST";
    case Method::Sparsa: return "SpaRSA";
    case Method::Gscg: return "GSCG";
    case Method::Isga: return "ISGA";
  }
  return "?";
}

std::optional<Method> method_from_name(std::string_view name) {
  std::string key;
  for (char c : name) {
    if (c != '-' && c != '_') key.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  if (key == "ista") return Method::Ista;
  if (key == "fista") return Method::Fista;
  if (key == "fpcbb") return Method::FpcBb;
  if (key == "twist") return Method::Twist;
  if (key == "sparsa") return Method::Sparsa;
  if (key == "gscg") return Method::Gscg;
  if (key == "isga") return Method::Isga;
  return std::nullopt;
}

SolverConfig default_solver_config(Method m) {
  SolverConfig cfg;
  cfg.method = m;
  cfg.eps_rel = (m == Method::Gscg || m == Method::Isga) ? 1e-7 : 1e-5;
  cfg.max_iter = 100000;
  return cfg;
}

Vector shrink(const Vector& x, double lambda) {
  require(lambda >= 0.0, ErrorKind::Argument, "shrink: negative threshold");
  Vector out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double mag = std::abs(x[i]) - lambda;
    out[i] = mag > 0.0 ? std::copysign(mag, x[i]) : 0.0;
  }
  return out;
}

double objective(const BpdnProblem& prob, const Vector& x) {
  check_dims(prob, x);
  return 0.5 * (prob.dict() * x - prob.patch()).squaredNorm() + prob.mu() * x.lpNorm<1>();
}

Vector gradient_f(const BpdnProblem& prob, const Vector& x) {
  check_dims(prob, x);
  return prob.dict().transpose() * (prob.dict() * x - prob.patch());
}

Vector ista_direction(const BpdnProblem& prob, const Vector& x, double tau) {
  require(tau > 0.0, ErrorKind::Argument, "ista_direction: tau must be positive");
  return shrink(x - tau * gradient_f(prob, x), prob.mu() * tau) - x;
}

double bb_steplength(const Vector& s, const Vector& y, StepClamp clamp) {
  require(s.size() == y.size(), ErrorKind::Argument, "bb_steplength: size mismatch");
  require(clamp.lo > 0.0 && clamp.lo <= clamp.hi, ErrorKind::Argument, "bb_steplength: bad clamp");
  const double ss = s.squaredNorm();
  if (ss == 0.0) return std::sqrt(clamp.lo * clamp.hi);
  const double sy = s.dot(y);
  if (!(sy > 0.0)) return clamp.hi;
  return std::clamp(ss / sy, clamp.lo, clamp.hi);
}

double estimate_lipschitz(const Matrix& dict, Vector* warm) {
  if (dict.size() == 0 || dict.squaredNorm() == 0.0) fail(ErrorKind::Degenerate, "lipschitz: all-zero dictionary");
  // Work on whichever Gram matrix is smaller; both share the nonzero spectrum.
  const Matrix gram = dict.rows() <= dict.cols() ? Matrix(dict * dict.transpose())
                                                 : Matrix(dict.transpose() * dict);
  const Eigen::Index dim = gram.rows();

  Vector v;
  if (warm && warm->size() == dim && warm->norm() > 0.0) {
    v = *warm;
  } else {
    v.resize(dim);
    for (Eigen::Index i = 0; i < dim; ++i) v[i] = 1.0 + 0.25 * std::sin(static_cast<double>(i + 1));
  }
  v.normalize();

  double lambda = 0.0;
  Vector w(dim);
  for (int it = 0; it < 200000; ++it) {
    w.noalias() = gram * v;
    lambda = v.dot(w);
    const double wn = w.norm();
    if (wn == 0.0) {
      // Start vector in the null space; fall back to a coordinate vector with mass.
      Eigen::Index j = 0;
      gram.diagonal().maxCoeff(&j);
      v.setZero();
      v[j] = 1.0;
      continue;
    }
    const double resid = (w - lambda * v).norm();
    v = w / wn;
    if (resid <= 1e-10 * lambda) break;
  }
  if (warm) *warm = v;
  // Residual bound keeps the estimate within ~1e-10; pad so it is an upper bound.
  return lambda * (1.0 + 2e-9);
}

double check_optimality(const BpdnProblem& prob, const Vector& x, double tau) {
  require(tau > 0.0, ErrorKind::Argument, "check_optimality: tau must be positive");
  check_dims(prob, x);
  return ista_direction(prob, x, tau).lpNorm<Eigen::Infinity>();
}

SparseCode solve(const BpdnProblem& prob, const SolverConfig& cfg) {
  switch (cfg.method) {
    case Method::Ista: return solve_ista(prob, cfg);
    case Method::Fista: return solve_fista(prob, cfg);
    case Method::FpcBb: return solve_fpc_bb(prob, cfg);
    case Method::Twist: return solve_twist(prob, cfg);
    case Method::Sparsa: return solve_sparsa(prob, cfg);
    case Method::Gscg: return solve_gscg(prob, cfg);
    case Method::Isga: return solve_isga(prob, cfg);
  }
  fail(ErrorKind::Config, "unknown solver method");
}

}  // namespace spdl
