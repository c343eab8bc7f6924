#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace spdl {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// One coding instance: min_x 1/2 |Dx - p|^2 + mu |x|_1.
// Holds a reference to the dictionary; the caller keeps it alive.
class BpdnProblem {
 public:
  // `lipschitz` may be supplied when the caller already knows lambda_max(D^T D).
  BpdnProblem(const Matrix& dict, Vector patch, double mu, std::optional<double> lipschitz = std::nullopt);
  BpdnProblem(Matrix&&, Vector, double, std::optional<double> = std::nullopt) = delete;

  const Matrix& dict() const { return *dict_; }
  const Vector& patch() const { return patch_; }
  double mu() const { return mu_; }
  double lipschitz() const { return lipschitz_; }
  Eigen::Index code_length() const { return dict_->cols(); }

 private:
  const Matrix* dict_;
  Vector patch_;
  double mu_;
  double lipschitz_;
};

enum class Method { Ista, Fista, FpcBb, Twist, Sparsa, Gscg, Isga };

inline constexpr Method kAllMethods[] = {Method::Ista,   Method::Fista, Method::FpcBb, Method::Twist,
                                         Method::Sparsa, Method::Gscg,  Method::Isga};

std::string_view method_name(Method m);
std::optional<Method> method_from_name(std::string_view name);

struct MethodParams {
  // BB step clamp, shared by FPC-BB, SpaRSA, GSCG and ISGA.
  double bb_min = 1e-10;
  double bb_max = 1e10;
  // FPC-BB continuation: mu_bar_0 = mu0_factor * |D^T p|_inf, shrunk by eta per stage.
  double fpc_eta = 0.25;
  double fpc_mu0_factor = 0.1;
  // TwIST two-step weights; requires 0 < alpha < 2 and 0 < beta < c * alpha.
  double twist_alpha = 1.8;
  double twist_beta = 1.0;
  double twist_c = 1.0;
  // SpaRSA non-monotone window, sufficient decrease constant and step contraction.
  int sparsa_window = 5;
  double sparsa_sigma = 1e-5;
  double sparsa_contraction = 0.5;
  // GSCG descent constant and BB/previous-step mixing weight.
  double gscg_sigma = 1e-4;
  double gscg_gamma = 0.5;
  // ISGA Goldstein constants, 0 < c1 < c2 < 1.
  double isga_c1 = 0.1;
  double isga_c2 = 0.9;
};

struct SolverConfig {
  Method method = Method::Fista;
  double eps_rel = 1e-5;
  std::uint64_t max_iter = 100000;
  std::optional<Vector> x0;
  MethodParams params;
  // When > 0, also stop once |p - Dx| <= data_residual_tol * |p|.
  double data_residual_tol = 0.0;
  bool record_history = false;
};

// Defaults for coding during learning: eps 1e-7 for GSCG/ISGA, 1e-5 otherwise, 100000 iterations.
SolverConfig default_solver_config(Method m);

enum class StopReason { ZeroOptimal, IterateChange, DataResidual, MaxIter };

struct SparseCode {
  Vector x;
  std::uint64_t iterations = 0;
  double objective = 0.0;
  // |x - S_{mu/L}(x - grad f(x)/L)|_inf
  double fixed_point_residual = 0.0;
  bool converged = false;
  StopReason stop = StopReason::MaxIter;
  int stages = 1;  // continuation stages (FPC-BB); 1 for the others
  double wall_time = 0.0;
  double cpu_time = 0.0;
  std::vector<double> history;  // objective per iterate, x0 first; only when requested
  std::vector<double> steps;    // accepted line-search step (or SpaRSA tau) per iterate; only when requested
};

// Soft thresholding: sgn(x) * max(|x| - lambda, 0).
Vector shrink(const Vector& x, double lambda);

double objective(const BpdnProblem& prob, const Vector& x);

// D^T (Dx - p)
Vector gradient_f(const BpdnProblem& prob, const Vector& x);

Vector ista_direction(const BpdnProblem& prob, const Vector& x, double tau);

struct StepClamp {
  double lo = 1e-10;
  double hi = 1e10;
};

// s^T s / s^T y, clamped. Non-positive curvature returns hi; zero s returns the log-midpoint.
double bb_steplength(const Vector& s, const Vector& y, StepClamp clamp = {});

// Largest eigenvalue of D^T D by power iteration. `warm` (optional) seeds and receives the
// dominant eigenvector of the smaller Gram matrix.
double estimate_lipschitz(const Matrix& dict, Vector* warm = nullptr);

double check_optimality(const BpdnProblem& prob, const Vector& x, double tau);

SparseCode solve(const BpdnProblem& prob, const SolverConfig& cfg);

SparseCode solve_ista(const BpdnProblem& prob, const SolverConfig& cfg);
SparseCode solve_fista(const BpdnProblem& prob, const SolverConfig& cfg);
SparseCode solve_fpc_bb(const BpdnProblem& prob, const SolverConfig& cfg);
SparseCode solve_twist(const BpdnProblem& prob, const SolverConfig& cfg);
SparseCode solve_sparsa(const BpdnProblem& prob, const SolverConfig& cfg);
SparseCode solve_gscg(const BpdnProblem& prob, const SolverConfig& cfg);
SparseCode solve_isga(const BpdnProblem& prob, const SolverConfig& cfg);

}  // namespace spdl
