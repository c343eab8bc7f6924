#include <doctest.h>

#include "core/bpdn.hpp"
#include "core/error.hpp"
#include "oracles.hpp"

using namespace spdl;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double e : v) out(i++) = e;
  return out;
}

SolverConfig config(Method m) { return default_solver_config(m); }

bool nonincreasing(const std::vector<double>& h) {
  for (std::size_t i = 1; i < h.size(); ++i) {
    if (h[i] > h[i - 1] * (1.0 + 1e-14) + 1e-300) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("identity dictionary: every solver finds the prox solution") {
  const Matrix I2 = Matrix::Identity(2, 2);
  for (Method m : kAllMethods) {
    CAPTURE(method_name(m));
    for (const Vector& p : {vec({1, 0}), vec({1, 0.1})}) {
      const BpdnProblem prob(I2, p, 0.25);
      auto cfg = config(m);
      cfg.eps_rel = 1e-12;
      const auto code = solve(prob, cfg);
      CHECK(code.converged);
      CHECK(std::abs(code.x(0) - 0.75) <= 1e-9);
      CHECK(std::abs(code.x(1)) <= 1e-9);
      CHECK(code.objective >= 0.0);
    }
  }
}

TEST_CASE("zero data and zero-optimal instances return zero") {
  const auto in = oracle::random_instance(5);
  for (Method m : kAllMethods) {
    CAPTURE(method_name(m));
    const BpdnProblem zero(in.D, Vector::Zero(8), in.mu);
    const auto z = solve(zero, config(m));
    CHECK(z.x.norm() == 0.0);
    CHECK(z.stop == StopReason::ZeroOptimal);
    CHECK(z.converged);

    const double big_mu = (in.D.transpose() * in.p).cwiseAbs().maxCoeff();
    const BpdnProblem flat(in.D, in.p, big_mu);
    CHECK(solve(flat, config(m)).x.norm() == 0.0);
  }
}

TEST_CASE("converged solves certify the fixed-point residual and agree on the minimiser") {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const auto in = oracle::random_instance(500 + seed);
    const BpdnProblem prob(in.D, in.p, in.mu);
    std::vector<Vector> xs;
    for (Method m : kAllMethods) {
      CAPTURE(method_name(m));
      CAPTURE(seed);
      for (double eps : {1e-5, 1e-10}) {
        auto cfg = config(m);
        cfg.eps_rel = eps;
        const auto code = solve(prob, cfg);
        REQUIRE(code.converged);
        CHECK(code.fixed_point_residual <= 10.0 * eps * (1.0 + code.x.lpNorm<Eigen::Infinity>()));
        CHECK(code.fixed_point_residual == doctest::Approx(check_optimality(prob, code.x, 1.0 / prob.lipschitz())));
        CHECK(code.objective == doctest::Approx(objective(prob, code.x)).epsilon(1e-14));
        if (eps == 1e-10) xs.push_back(code.x);
      }
    }
    for (std::size_t i = 1; i < xs.size(); ++i) CHECK((xs[i] - xs[0]).lpNorm<Eigen::Infinity>() <= 1e-5);
  }
}

TEST_CASE("ISTA and safeguarded TwIST objectives are non-increasing") {
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const auto in = oracle::random_instance(900 + seed);
    const BpdnProblem prob(in.D, in.p, in.mu);
    for (Method m : {Method::Ista, Method::Twist}) {
      auto cfg = config(m);
      cfg.record_history = true;
      const auto code = solve(prob, cfg);
      CHECK(code.history.size() == code.iterations + 1);
      CHECK(nonincreasing(code.history));
    }
  }
}

TEST_CASE("TwIST with alpha = beta = 1 reproduces ISTA") {
  const auto in = oracle::random_instance(42);
  const BpdnProblem prob(in.D, in.p, in.mu);
  auto ista = config(Method::Ista);
  ista.record_history = true;
  auto twist = config(Method::Twist);
  twist.record_history = true;
  twist.params.twist_alpha = 1.0;
  twist.params.twist_beta = 1.0;
  twist.params.twist_c = 2.0;  // beta < c * alpha must hold strictly
  const auto a = solve(prob, ista);
  const auto b = solve(prob, twist);
  CHECK(a.iterations == b.iterations);
  CHECK(a.history == b.history);
  CHECK(a.x == b.x);
}

TEST_CASE("config validation") {
  const auto in = oracle::random_instance(1);
  const BpdnProblem prob(in.D, in.p, in.mu);
  auto expect_config_error = [&](SolverConfig cfg) {
    try {
      solve(prob, cfg);
      FAIL("expected config error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Config);
    }
  };
  auto c = config(Method::Twist);
  c.params.twist_alpha = 2.0;
  expect_config_error(c);
  c = config(Method::Twist);
  c.params.twist_beta = 1.8;  // beta == c * alpha
  expect_config_error(c);
  c = config(Method::Twist);
  c.params.twist_alpha = c.params.twist_beta = 1.0;  // default c = 1
  expect_config_error(c);
  c = config(Method::Fista);
  c.eps_rel = 0.0;
  expect_config_error(c);
  c = config(Method::Fista);
  c.max_iter = 0;
  expect_config_error(c);
  c = config(Method::Fista);
  c.x0 = Vector::Zero(3);
  expect_config_error(c);
  c = config(Method::Isga);
  c.params.isga_c1 = 0.95;
  expect_config_error(c);
  c = config(Method::Sparsa);
  c.params.sparsa_window = 0;
  expect_config_error(c);
  c = config(Method::FpcBb);
  c.params.fpc_eta = 1.0;
  expect_config_error(c);
}

TEST_CASE("FPC-BB continuation") {
  const auto in = oracle::random_instance(77);
  const BpdnProblem prob(in.D, in.p, in.mu);
  auto cfg = config(Method::FpcBb);
  cfg.eps_rel = 1e-10;
  const auto multi = solve(prob, cfg);
  CHECK(multi.stages > 1);
  // mu_bar_0 = mu: a single stage of plain BB fixed-point iteration
  cfg.params.fpc_mu0_factor = 1e-12;
  const auto single = solve(prob, cfg);
  CHECK(single.stages == 1);
  CHECK(single.converged);
  CHECK((single.x - multi.x).lpNorm<Eigen::Infinity>() <= 1e-6);
}

TEST_CASE("SpaRSA with window 1 is monotone") {
  const auto in = oracle::random_instance(78);
  const BpdnProblem prob(in.D, in.p, in.mu);
  auto cfg = config(Method::Sparsa);
  cfg.params.sparsa_window = 1;
  cfg.record_history = true;
  const auto code = solve(prob, cfg);
  CHECK(code.converged);
  CHECK(nonincreasing(code.history));
}

TEST_CASE("GSCG first iteration is the ISTA direction") {
  const auto in = oracle::random_instance(79);
  const BpdnProblem prob(in.D, in.p, in.mu);
  auto cfg = config(Method::Gscg);
  cfg.max_iter = 1;
  cfg.record_history = true;
  const auto code = solve(prob, cfg);
  REQUIRE(code.iterations == 1);
  REQUIRE(code.steps.size() == 1);
  const Vector x0 = Vector::Constant(16, (in.D.transpose() * in.p).cwiseAbs().maxCoeff());
  const Vector d = ista_direction(prob, x0, 1.0 / prob.lipschitz());
  CHECK((code.x - (x0 + code.steps[0] * d)).norm() <= 1e-12 * x0.norm());
  CHECK(code.stop == StopReason::MaxIter);
  CHECK_FALSE(code.converged);
}

TEST_CASE("ISGA accepts the unit step on an exact quadratic model") {
  const Matrix I2 = Matrix::Identity(2, 2);
  const BpdnProblem prob(I2, vec({1, 0.1}), 0.25);
  auto cfg = config(Method::Isga);
  cfg.record_history = true;
  const auto code = solve(prob, cfg);
  REQUIRE(!code.steps.empty());
  CHECK(code.steps[0] == 1.0);
  CHECK(code.x.isApprox(vec({0.75, 0})));
}

TEST_CASE("explicit x0 and iteration cap") {
  const auto in = oracle::random_instance(80);
  const BpdnProblem prob(in.D, in.p, in.mu);
  for (Method m : kAllMethods) {
    auto cfg = config(m);
    cfg.x0 = Vector::Zero(16);
    cfg.max_iter = 3;
    const auto code = solve(prob, cfg);
    CHECK(code.iterations <= 3);
    CHECK(code.cpu_time >= 0.0);
    CHECK(code.wall_time >= 0.0);
  }
}

TEST_CASE("data residual stop") {
  const auto in = oracle::random_instance(81, 8, 16, 3, 0.0);
  const BpdnProblem prob(in.D, in.p, 1e-9);
  auto cfg = config(Method::Fista);
  cfg.data_residual_tol = 1e-3;
  cfg.eps_rel = 1e-14;
  const auto code = solve(prob, cfg);
  CHECK(code.stop == StopReason::DataResidual);
  CHECK((in.D * code.x - in.p).norm() <= 1e-3 * in.p.norm());
}

TEST_CASE("non-finite data is reported as divergence") {
  const auto in = oracle::random_instance(82);
  Vector p = in.p;
  p(0) = std::numeric_limits<double>::infinity();
  for (Method m : kAllMethods) {
    try {
      const BpdnProblem prob(in.D, p, in.mu, 5.0);
      solve(prob, config(m));
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK((e.kind() == ErrorKind::Divergence || e.kind() == ErrorKind::Argument));
    }
  }
}
