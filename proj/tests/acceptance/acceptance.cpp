// Acceptance checks 1-10. One PASS/FAIL line per criterion; exit status is the number of FAILs.
//   acceptance --cli <spdl> --corpus <dir> --work <dir> [--only N] [--resize R]

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "core/bpdn.hpp"
#include "core/dictionary.hpp"
#include "core/learn.hpp"
#include "core/patchgrid.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace spdl;

namespace {

struct Args {
  std::string cli;
  fs::path corpus;
  fs::path work = "acceptance_work";
  int only = 0;
  std::size_t resize = 42;
};

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* spec, auto... v) {
  char buf[512];
  std::snprintf(buf, sizeof buf, spec, v...);
  return buf;
}

int shell(const std::string& cmd, const fs::path& log) {
  const int rc = std::system((cmd + " > '" + log.string() + "' 2>&1").c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::ifstream in(p);
  for (std::string line; std::getline(in, line);) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
    rows.push_back(cells);
  }
  return rows;
}

double rel_diff(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

// ---- 1 and 2 share the oracle suite ----

struct SuiteResult {
  double worst_rel = 0.0;
  double worst_residual = 0.0;
  int converged = 0;
  int solves = 0;
  int oracle_misses = 0;
  double seconds = 0.0;
};

const SuiteResult& oracle_suite() {
  static SuiteResult r = [] {
    SuiteResult s;
    const auto t0 = std::chrono::steady_clock::now();
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto in = oracle::random_instance(1000 + seed);
      const auto ref = oracle::bpdn_by_sign_enumeration(in.D, in.p, in.mu);
      if (!ref.found) {
        ++s.oracle_misses;
        continue;
      }
      const double L = oracle::lambda_max(in.D);
      const BpdnProblem prob(in.D, in.p, in.mu);
      for (Method m : kAllMethods) {
        SolverConfig cfg = default_solver_config(m);
        cfg.eps_rel = 1e-10;
        cfg.max_iter = 1000000;
        const SparseCode code = solve(prob, cfg);
        ++s.solves;
        const double F = oracle::bpdn_objective(in.D, in.p, in.mu, code.x);
        s.worst_rel = std::max(s.worst_rel, rel_diff(F, ref.objective));
        if (code.converged) {
          ++s.converged;
          const Vector g = in.D.transpose() * (in.D * code.x - in.p);
          const Vector z = code.x - g / L;
          Vector sx(z.size());
          for (Eigen::Index i = 0; i < z.size(); ++i) {
            const double t = std::abs(z(i)) - in.mu / L;
            sx(i) = t > 0.0 ? std::copysign(t, z(i)) : 0.0;
          }
          s.worst_residual = std::max(s.worst_residual, (code.x - sx).lpNorm<Eigen::Infinity>());
        }
      }
    }
    s.seconds = seconds_since(t0);
    return s;
  }();
  return r;
}

Outcome criterion1(const Args&) {
  const auto& s = oracle_suite();
  const bool ok = s.oracle_misses == 0 && s.solves == 140 && s.worst_rel <= 1e-6 && s.seconds < 60.0;
  return {ok, fmt("20 instances x 7 solvers, worst relative objective gap %.3g, %.1f s", s.worst_rel, s.seconds)};
}

Outcome criterion2(const Args&) {
  const auto& s = oracle_suite();
  const bool ok = s.converged == s.solves && s.solves > 0 && s.worst_residual <= 1e-5;
  return {ok, fmt("%d/%d converged, worst fixed-point residual %.3g", s.converged, s.solves, s.worst_residual)};
}

// ---- 3 ----

Outcome criterion3(const Args&) {
  // 16 x 32 with singular values from 1 down to 1e-3
  std::mt19937_64 rng(33);
  std::normal_distribution<double> g;
  auto gaussian = [&](Eigen::Index r, Eigen::Index c) {
    Matrix M(r, c);
    for (Eigen::Index j = 0; j < c; ++j)
      for (Eigen::Index i = 0; i < r; ++i) M(i, j) = g(rng);
    return M;
  };
  const Matrix U = Eigen::HouseholderQR<Matrix>(gaussian(16, 16)).householderQ();
  const Matrix V = Eigen::HouseholderQR<Matrix>(gaussian(32, 32)).householderQ();
  Vector sv(16);
  for (int i = 0; i < 16; ++i) sv(i) = std::pow(10.0, -3.0 * i / 15.0);
  const Matrix D = U * sv.asDiagonal() * V.leftCols(16).transpose();
  Vector x_true = Vector::Zero(32);
  for (int i : {2, 9, 17, 30}) x_true(i) = 1.0 + 0.5 * g(rng);
  const Vector p = D * x_true + 1e-3 * gaussian(16, 1).col(0);
  const double mu = 1.0 / 256.0;
  const BpdnProblem prob(D, p, mu);

  auto run = [&](Method m, std::uint64_t cap) {
    SolverConfig cfg = default_solver_config(m);
    cfg.eps_rel = 1e-15;
    cfg.max_iter = cap;
    cfg.record_history = true;
    return solve(prob, cfg);
  };
  const std::uint64_t cap = 3000000;
  const auto ista = run(Method::Ista, cap);
  const auto fista = run(Method::Fista, cap);
  SolverConfig ref_cfg = default_solver_config(Method::Isga);
  ref_cfg.eps_rel = 1e-14;
  ref_cfg.max_iter = cap;
  const auto ref = solve(prob, ref_cfg);
  double fstar = ref.objective;
  for (double f : ista.history) fstar = std::min(fstar, f);
  for (double f : fista.history) fstar = std::min(fstar, f);

  auto first_hit = [&](const std::vector<double>& h) -> std::int64_t {
    for (std::size_t k = 0; k < h.size(); ++k)
      if (h[k] - fstar <= 1e-8) return static_cast<std::int64_t>(k);
    return -1;
  };
  const auto ki = first_hit(ista.history);
  const auto kf = first_hit(fista.history);
  const bool ok = kf >= 0 && (ki < 0 || kf < ki);
  return {ok, fmt("cond 1e3 (16x32): iterations to 1e-8 gap FISTA %lld, ISTA %lld%s", static_cast<long long>(kf),
                  static_cast<long long>(ki), ki < 0 ? " (not reached)" : "")};
}

// ---- 4 ----

Outcome criterion4(const Args&) {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(44);
  std::normal_distribution<double> g;
  double worst_a = 0.0, worst_b = 0.0, worst_grad = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const int m = 16, n = 32, k = 20;
    Matrix D(m, n);
    for (auto& v : D.reshaped()) v = g(rng);
    LearnState st(m, n);
    std::vector<Vector> xs, ps;
    for (int i = 0; i < k; ++i) {
      Vector x(n), p(m);
      for (auto& v : x) v = g(rng);
      for (auto& v : p) v = g(rng);
      accumulate(st, x, p);
      xs.push_back(x);
      ps.push_back(p);
    }
    double sum_a = 0.0, sum_b = 0.0;
    for (int i = 0; i < k; ++i) {
      const Vector Dx = D * xs[i];
      sum_a += Dx.dot(Dx);
      sum_b += 0.5 * (xs[i].dot(D.transpose() * ps[i]) + ps[i].dot(Dx));
    }
    const double tr_a = (D.transpose() * D * st.A).trace();
    const double tr_b = (D.transpose() * st.B).trace();
    worst_a = std::max(worst_a, rel_diff(tr_a, sum_a));
    worst_b = std::max(worst_b, rel_diff(tr_b, sum_b));
    // library surrogate against the same sums
    worst_a = std::max(worst_a, rel_diff(k * surrogate_objective(D, st), 0.5 * sum_a - sum_b));

    const Matrix grad = surrogate_gradient(D, st);
    const Matrix fd = oracle::central_difference([&](const Matrix& X) { return k * surrogate_objective(X, st); }, D, 1e-5);
    worst_grad = std::max(worst_grad, (grad - fd).norm() / grad.norm());
  }
  const double secs = seconds_since(t0);
  const bool ok = worst_a <= 1e-6 && worst_b <= 1e-6 && worst_grad <= 1e-6 && secs < 5.0;
  return {ok, fmt("10 trials: trace(D'DA) %.2g, trace(D'B) %.2g, gradient vs central differences %.2g, %.2f s",
                  worst_a, worst_b, worst_grad, secs)};
}

// ---- 5 ----

Outcome criterion5(const Args&) {
  std::mt19937_64 rng(55);
  std::uniform_real_distribution<double> u(0.0, 255.0);
  std::size_t total = 0;
  double worst = 0.0;
  const GridPlan plan = plan_grid(112, 112, 6, 0.5);
  for (int i = 0; i < 12; ++i) {
    GrayImage img(112, 112);
    for (auto& v : img.data) v = u(rng);
    const PatchMatrix P = extract_patches(img, plan);
    total += static_cast<std::size_t>(P.cols());
    const GrayImage back = assemble_image(P, plan);
    const GrayImage crop = crop_to_plan(img, plan);
    for (std::size_t k = 0; k < back.data.size(); ++k) worst = std::max(worst, std::abs(back.data[k] - crop.data[k]));
  }
  for (auto [h, w] : {std::pair<std::size_t, std::size_t>{113, 117}, {40, 9}}) {
    const GridPlan p2 = plan_grid(h, w, 6, 0.5);
    GrayImage img(h, w);
    for (auto& v : img.data) v = u(rng);
    const GrayImage back = assemble_image(extract_patches(img, p2), p2);
    const GrayImage crop = crop_to_plan(img, p2);
    for (std::size_t k = 0; k < back.data.size(); ++k) worst = std::max(worst, std::abs(back.data[k] - crop.data[k]));
  }
  const bool ok = plan.count() == 1296 && total == 15552 && worst <= 1e-12;
  return {ok, fmt("%zu patches per 112x112 image, %zu over 12 images, round-trip max error %.3g", plan.count(), total,
                  worst)};
}

// ---- 6 ----

Outcome criterion6(const Args&) {
  std::mt19937_64 rng(66);
  std::normal_distribution<double> g;
  const int m = 16, n = 32;
  const std::vector<int> unused = {3, 11, 20, 31};
  LearnState st(m, n);
  for (int i = 0; i < 40; ++i) {
    Vector x(n), p(m);
    for (auto& v : x) v = g(rng);
    for (int j : unused) x(j) = 0.0;
    for (auto& v : p) v = g(rng);
    accumulate(st, x, p);
  }
  Matrix D0(m, n);
  for (auto& v : D0.reshaped()) v = g(rng);
  for (int j = 0; j < n; ++j) D0.col(j) /= D0.col(j).norm() * 1.5;
  Dictionary dict(D0);
  double prev = surrogate_objective(dict.atoms(), st);
  const double first = prev;
  int increases = 0;
  double worst_norm = 0.0;
  for (int sweep = 0; sweep < 50; ++sweep) {
    update_dictionary(dict, st, 1);
    const double now = surrogate_objective(dict.atoms(), st);
    if (now > prev) ++increases;
    prev = now;
    for (int j = 0; j < n; ++j) worst_norm = std::max(worst_norm, dict.atoms().col(j).norm());
  }
  bool untouched = true;
  for (int j : unused) {
    untouched = untouched && std::memcmp(dict.atoms().col(j).data(), D0.col(j).data(), sizeof(double) * m) == 0;
  }
  const bool ok = increases == 0 && worst_norm <= 1.0 + 1e-12 && untouched;
  return {ok, fmt("50 sweeps: surrogate %.6g -> %.6g, %d increases, max atom norm %.15f, A_jj=0 atoms %s", first, prev,
                  increases, worst_norm, untouched ? "bit-unchanged" : "CHANGED")};
}

// ---- 7 ----

Outcome criterion7(const Args&) {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(77);
  std::normal_distribution<double> g;
  const int m = 16, n = 32, samples = 4000, sparsity = 4;
  Matrix truth(m, n);
  for (auto& v : truth.reshaped()) v = g(rng);
  for (int j = 0; j < n; ++j) truth.col(j).normalize();

  std::vector<Vector> data;
  std::vector<int> idx(n);
  for (int s = 0; s < samples; ++s) {
    for (int j = 0; j < n; ++j) idx[j] = j;
    std::shuffle(idx.begin(), idx.end(), rng);
    Vector x = Vector::Zero(n);
    for (int t = 0; t < sparsity; ++t) x(idx[t]) = g(rng);
    data.push_back(truth * x);
  }
  Matrix init(m, n);
  for (int j = 0; j < n; ++j) init.col(j) = data[j].normalized();

  // FISTA defaults. The 2^-8 default belongs to [0,255] pixels; here mu follows the data scale,
  // 1.2/sqrt(m) times the mean sample norm.
  double mean_norm = 0.0;
  for (const auto& p : data) mean_norm += p.norm() / samples;
  LearnConfig cfg;
  cfg.mu = 1.2 / std::sqrt(double(m)) * mean_norm;
  OnlineLearner learner{Dictionary(init), cfg};
  for (const auto& p : data) learner.step(p);

  const Matrix& learned = learner.dictionary().atoms();
  int matched = 0;
  for (int j = 0; j < n; ++j) {
    double best = 0.0;
    for (int k = 0; k < n; ++k) {
      const double nk = learned.col(k).norm();
      if (nk > 0.0) best = std::max(best, std::abs(learned.col(k).dot(truth.col(j))) / nk);
    }
    if (best > 0.9) ++matched;
  }
  const double secs = seconds_since(t0);
  const bool ok = matched >= 0.7 * n && secs < 300.0;
  return {ok, fmt("%d/%d true atoms matched at |<d,d*>| > 0.9 after one ordered pass over %d samples (mu %.3g), %.1f s",
                  matched, n, samples, cfg.mu, secs)};
}

// ---- 8 ----

Outcome criterion8(const Args& a) {
  const auto t0 = std::chrono::steady_clock::now();
  const fs::path dir = a.work / "c8";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string common = " --resize " + std::to_string(a.resize);
  if (shell("'" + a.cli + "' learn --data '" + a.corpus.string() + "' --out '" + (dir / "dicts").string() + "'" +
                common + " --solver FISTA",
            dir / "learn.log") != 0) {
    return {false, "learn failed: " + slurp(dir / "learn.log")};
  }
  // ISGA and GSCG stop at 1e-10 by default, which the learned dictionaries do not reach in any
  // reasonable time; they run under an explicit iteration cap that the report states.
  const std::string dicts = "'" + (dir / "dicts").string() + "/D0[16].sdic'";
  const std::vector<std::pair<std::string, std::string>> runs = {{"FISTA,TwIST", ""},
                                                                  {"ISGA,GSCG", " --max-iter 2000"}};
  std::map<std::string, double> re;  // "SOLVER/Dxx" -> mean ReEr
  for (std::size_t r = 0; r < runs.size(); ++r) {
    const fs::path out = dir / ("eval" + std::to_string(r));
    if (shell("'" + a.cli + "' evaluate --dicts " + dicts + " --eval-dir '" + a.corpus.string() + "' --out '" +
                  out.string() + "'" + common + " --solver " + runs[r].first + runs[r].second,
              dir / "eval.log") != 0) {
      return {false, "evaluate failed: " + slurp(dir / "eval.log")};
    }
    const auto rows = read_csv(out / "aggregate.csv");
    for (std::size_t i = 1; i < rows.size(); ++i) {
      if (rows[i].size() >= 4) re[rows[i][0] + "/" + rows[i][1]] = std::stod(rows[i][3]);
    }
  }
  const double secs = seconds_since(t0);
  auto get = [&](const char* s, const char* d) {
    const auto it = re.find(std::string(s) + "/" + d);
    return it == re.end() ? std::nan("") : it->second;
  };
  std::string detail = fmt("%zux%zu corpus, ISGA/GSCG capped at 2000 iterations, %.0f s;", a.resize, a.resize, secs);
  bool ok = secs < 600.0;
  for (const char* s : {"FISTA", "ISGA"}) {
    const double d1 = get(s, "D01"), d6 = get(s, "D06");
    const bool drop = d6 <= 0.8 * d1;
    ok = ok && drop;
    detail += fmt(" %s ReEr D1 %.4g -> D6 %.4g (%+.1f%%)%s;", s, d1, d6, 100.0 * (d6 - d1) / d1,
                  drop ? "" : " [needs -20%]");
  }
  for (const char* s : {"TwIST", "GSCG"}) {
    const double d1 = get(s, "D01"), d6 = get(s, "D06");
    const bool sat = d1 <= 3.0 * d6;
    ok = ok && sat;
    detail += fmt(" %s D1/D6 %.3g%s;", s, d1 / d6, sat ? "" : " [needs <= 3]");
  }
  return {ok, detail};
}

// ---- 9 ----

Outcome criterion9(const Args& a) {
  const fs::path dir = a.work / "c9";
  fs::remove_all(dir);
  const std::string base = "'" + a.cli + "' learn --data '" + a.corpus.string() +
                           "' --resize 24 --patch 6 --order random --seed 9 --out '";
  for (const char* run : {"r1", "r2"}) {
    fs::create_directories(dir);
    if (shell(base + (dir / run).string() + "'", dir / (std::string(run) + ".log")) != 0) {
      return {false, std::string("learn failed: ") + slurp(dir / (std::string(run) + ".log"))};
    }
  }
  std::size_t files = 0, same = 0;
  for (const auto& e : fs::directory_iterator(dir / "r1")) {
    if (e.path().extension() != ".sdic") continue;
    ++files;
    const fs::path other = dir / "r2" / e.path().filename();
    if (fs::exists(other) && slurp(e.path()) == slurp(other)) ++same;
  }
  const bool ok = files == 7 && same == files;
  return {ok, fmt("%zu/%zu SDIC snapshots bit-identical across two seeded runs", same, files)};
}

// ---- 10 ----

Outcome criterion10(const Args& a) {
  const fs::path dir = a.work / "c10";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string common = " --resize 24 --patch 6";
  if (shell("'" + a.cli + "' learn --data '" + a.corpus.string() + "' --out '" + (dir / "d").string() + "'" + common,
            dir / "learn.log") != 0) {
    return {false, "learn failed: " + slurp(dir / "learn.log")};
  }
  // GSCG and ISGA under the same iteration cap as in the trend check
  const std::vector<std::pair<std::string, std::string>> runs = {{"ISTA,FISTA,FPC-BB,TwIST,SpaRSA", ""},
                                                                  {"GSCG,ISGA", " --max-iter 2000"}};
  std::string detail = "mean CPU s per patch / per image:";
  bool ok = true;
  std::size_t solvers = 0;
  for (std::size_t r = 0; r < runs.size(); ++r) {
    const fs::path out = dir / ("e" + std::to_string(r));
    if (shell("'" + a.cli + "' evaluate --dicts '" + (dir / "d").string() + "/D06.sdic' --eval-dir '" +
                  a.corpus.string() + "' --out '" + out.string() + "'" + common + " --solver " + runs[r].first +
                  runs[r].second,
              dir / "eval.log") != 0) {
      return {false, "evaluate failed: " + slurp(dir / "eval.log")};
    }
    for (const char* file : {"aggregate.csv", "metrics.csv"}) {
      const auto rows = read_csv(out / file);
      const std::size_t n = rows.empty() ? 0 : rows[0].size();
      if (n < 2 || rows[0][n - 2] != "cpu_patch_mean" || rows[0][n - 1] != "cpu_image") {
        return {false, std::string(file) + " lacks cpu_patch_mean/cpu_image columns"};
      }
    }
    const auto rows = read_csv(out / "aggregate.csv");
    for (std::size_t i = 1; i < rows.size(); ++i) {
      ok = ok && rows[i].size() == 8 && std::stod(rows[i][6]) >= 0.0 && std::stod(rows[i][7]) >= 0.0;
      detail += " " + rows[i][0] + (runs[r].second.empty() ? "" : "(capped)") + " " + rows[i][6] + "/" + rows[i][7];
      ++solvers;
    }
  }
  return {ok && solvers == 7, detail + " (reported, not asserted)"};
}

}  // namespace

int main(int argc, char** argv) {
  Args a;
  for (int i = 1; i + 1 < argc; i += 2) {
    const std::string k = argv[i], v = argv[i + 1];
    if (k == "--cli") a.cli = v;
    else if (k == "--corpus") a.corpus = v;
    else if (k == "--work") a.work = v;
    else if (k == "--only") a.only = std::stoi(v);
    else if (k == "--resize") a.resize = std::stoul(v);
    else {
      std::fprintf(stderr, "unknown argument %s\n", k.c_str());
      return 64;
    }
  }
  fs::create_directories(a.work);

  const std::vector<std::pair<const char*, std::function<Outcome(const Args&)>>> checks = {
      {"solver-oracle agreement", criterion1},   {"fixed-point optimality", criterion2},
      {"FISTA beats ISTA", criterion3},          {"trace identities and gradient", criterion4},
      {"patch pipeline", criterion5},            {"dictionary update", criterion6},
      {"synthetic recovery", criterion7},        {"trend on mini-corpus", criterion8},
      {"determinism", criterion9},               {"timing columns", criterion10},
  };
  int failures = 0;
  for (std::size_t i = 0; i < checks.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (a.only != 0 && a.only != id) continue;
    Outcome o;
    try {
      o = checks[i].second(a);
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("%s %2d %s: %s\n", o.pass ? "PASS" : "FAIL", id, checks[i].first, o.detail.c_str());
    std::fflush(stdout);
  }
  return failures;
}
