#include "core/learn.hpp"

#include <algorithm>
#include <random>

#include "core/error.hpp"
#include "core/patchgrid.hpp"

namespace spdl {

namespace {

void check_state(std::size_t m, std::size_t n, const LearnState& state) {
  const bool ok = static_cast<std::size_t>(state.A.rows()) == n && static_cast<std::size_t>(state.A.cols()) == n &&
                  static_cast<std::size_t>(state.B.rows()) == m && static_cast<std::size_t>(state.B.cols()) == n;
  if (!ok) fail(ErrorKind::Argument, "learn state does not match dictionary dimensions");
}

}  // namespace

void accumulate(LearnState& state, const Vector& x, const Vector& p) {
  if (x.size() != state.A.rows() || p.size() != state.B.rows()) {
    fail(ErrorKind::Argument, "accumulate: dimension mismatch");
  }
  state.A.noalias() += x * x.transpose();
  state.B.noalias() += p * x.transpose();
  ++state.k;
}

void update_dictionary(Dictionary& dict, const LearnState& state, int sweeps, double skip_threshold) {
  check_state(dict.m(), dict.n(), state);
  Matrix& D = dict.mutable_atoms();
  Vector u(D.rows());
  for (int sweep = 0; sweep < sweeps; ++sweep) {
    for (Eigen::Index j = 0; j < D.cols(); ++j) {
      const double ajj = state.A(j, j);
      if (!(ajj > skip_threshold)) continue;
      u.noalias() = state.B.col(j) - D * state.A.col(j);
      u = u / ajj + D.col(j);
      D.col(j) = u / std::max(u.norm(), 1.0);
    }
  }
}

Dictionary updated_dictionary(const Dictionary& dict, const LearnState& state, int sweeps, double skip_threshold) {
  Dictionary out = dict;
  update_dictionary(out, state, sweeps, skip_threshold);
  return out;
}

double surrogate_objective(const Matrix& D, const LearnState& state) {
  check_state(static_cast<std::size_t>(D.rows()), static_cast<std::size_t>(D.cols()), state);
  if (state.k == 0) fail(ErrorKind::Degenerate, "surrogate objective undefined before any sample");
  const double quad = (D * state.A).cwiseProduct(D).sum();
  const double lin = D.cwiseProduct(state.B).sum();
  return (0.5 * quad - lin) / static_cast<double>(state.k);
}

Matrix surrogate_gradient(const Matrix& D, const LearnState& state) {
  check_state(static_cast<std::size_t>(D.rows()), static_cast<std::size_t>(D.cols()), state);
  return D * state.A - state.B;
}

OnlineLearner::OnlineLearner(Dictionary d0, LearnConfig cfg)
    : dict_(std::move(d0)), cfg_(std::move(cfg)), state_(dict_.m(), dict_.n()) {
  require(cfg_.mu > 0.0, ErrorKind::Config, "learn: mu must be positive");
  require(cfg_.update_sweeps >= 1, ErrorKind::Config, "learn: update_sweeps must be >= 1");
}

bool OnlineLearner::step(const Vector& patch) {
  if (static_cast<std::size_t>(patch.size()) != dict_.m()) fail(ErrorKind::Argument, "learn: patch length mismatch");
  SparseCode code;
  try {
    const double lip = estimate_lipschitz(dict_.atoms(), &power_vec_);
    const BpdnProblem prob(dict_.atoms(), patch, cfg_.mu, lip);
    code = solve(prob, cfg_.solver);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::Divergence && e.kind() != ErrorKind::Stagnation) throw;
    ++skipped_;
    failures_.push_back("sample " + std::to_string(coded_ + skipped_ - 1) + ": " + e.what());
    return false;
  }
  ++coded_;
  accumulate(state_, code.x, patch);
  // A zero code leaves A and B unchanged, so the surrogate is unchanged too.
  if (code.x.squaredNorm() > 0.0) update_dictionary(dict_, state_, cfg_.update_sweeps, cfg_.skip_threshold);
  return true;
}

LearnResult learn_online(const std::vector<GrayImage>& images, const LearnConfig& cfg, const Dictionary& d0,
                         const SnapshotFn& on_snapshot) {
  LearnResult result;
  result.snapshots.push_back(d0);
  if (on_snapshot) on_snapshot(0, d0);
  if (images.empty()) return result;

  std::vector<PatchMatrix> patches;
  patches.reserve(images.size());
  for (const auto& img : images) {
    const GridPlan plan = plan_grid(img.height, img.width, cfg.patch, cfg.overlap);
    if (plan.patch_dim() != d0.m()) fail(ErrorKind::Config, "learn: dictionary rows do not match patch size");
    patches.push_back(extract_patches(img, plan));
    result.patches_per_image.push_back(plan.count());
  }

  // (image, column) in draw order
  std::vector<std::pair<std::size_t, Eigen::Index>> order;
  std::vector<std::size_t> boundaries;
  for (std::size_t i = 0; i < patches.size(); ++i) {
    for (Eigen::Index c = 0; c < patches[i].cols(); ++c) order.emplace_back(i, c);
    boundaries.push_back(order.size());
  }
  if (cfg.order == DrawOrder::SeededRandom) {
    std::mt19937_64 rng(cfg.seed);
    std::shuffle(order.begin(), order.end(), rng);
  }

  OnlineLearner learner(d0, cfg);
  std::size_t next_boundary = 0;
  auto snapshot = [&] {
    result.snapshots.push_back(learner.dictionary());
    if (on_snapshot) on_snapshot(result.snapshots.size() - 1, result.snapshots.back());
  };
  for (std::size_t t = 0; t < order.size(); ++t) {
    const auto [img, col] = order[t];
    learner.step(patches[img].col(col));
    const std::size_t done = t + 1;
    if (cfg.snapshot_every > 0) {
      if (done % cfg.snapshot_every == 0 || done == order.size()) snapshot();
    } else if (done == boundaries[next_boundary]) {
      ++next_boundary;
      snapshot();
    }
  }
  result.coded = learner.coded();
  result.skipped = learner.skipped();
  result.failures = learner.failures();
  return result;
}

}  // namespace spdl
