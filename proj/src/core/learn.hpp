#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "core/bpdn.hpp"
#include "core/dictionary.hpp"
#include "core/image.hpp"

namespace spdl {

// Running statistics A = sum x x^T (n x n) and B = sum p x^T (m x n).
struct LearnState {
  Matrix A;
  Matrix B;
  std::uint64_t k = 0;

  LearnState() = default;
  LearnState(std::size_t m, std::size_t n) : A(Matrix::Zero(n, n)), B(Matrix::Zero(m, n)) {}
};

enum class DrawOrder { Ordered, SeededRandom };

struct LearnConfig {
  double mu = 1.0 / 256.0;
  SolverConfig solver = default_solver_config(Method::Fista);
  DrawOrder order = DrawOrder::Ordered;
  std::uint64_t seed = 0;
  int update_sweeps = 1;
  // 0: snapshot at every image boundary; otherwise every `snapshot_every` patches (and at the end).
  std::uint64_t snapshot_every = 0;
  std::size_t patch = 6;
  double overlap = 0.5;
  // Atoms with A_jj at or below this are left untouched by the update.
  double skip_threshold = 1e-12;
};

void accumulate(LearnState& state, const Vector& x, const Vector& p);

// Block-coordinate sweeps over the atoms; keeps every column in the unit ball.
void update_dictionary(Dictionary& dict, const LearnState& state, int sweeps = 1, double skip_threshold = 1e-12);
Dictionary updated_dictionary(const Dictionary& dict, const LearnState& state, int sweeps = 1,
                              double skip_threshold = 1e-12);

// (1/k) (1/2 Tr(D^T D A) - Tr(D^T B))
double surrogate_objective(const Matrix& D, const LearnState& state);

// D A - B
Matrix surrogate_gradient(const Matrix& D, const LearnState& state);

// One coding + accumulate + update step per sample.
class OnlineLearner {
 public:
  OnlineLearner(Dictionary d0, LearnConfig cfg);

  // Returns false when the coding step failed and the sample was skipped.
  bool step(const Vector& patch);

  const Dictionary& dictionary() const { return dict_; }
  const LearnState& state() const { return state_; }
  std::uint64_t coded() const { return coded_; }
  std::uint64_t skipped() const { return skipped_; }
  const std::vector<std::string>& failures() const { return failures_; }

 private:
  Dictionary dict_;
  LearnConfig cfg_;
  LearnState state_;
  Vector power_vec_;
  std::uint64_t coded_ = 0;
  std::uint64_t skipped_ = 0;
  std::vector<std::string> failures_;
};

struct LearnResult {
  std::vector<Dictionary> snapshots;              // snapshots[0] is D0
  std::vector<std::size_t> patches_per_image;
  std::uint64_t coded = 0;
  std::uint64_t skipped = 0;
  std::vector<std::string> failures;
};

using SnapshotFn = std::function<void(std::size_t stage, const Dictionary&)>;

// Images must already be grayscale at the learning resolution.
LearnResult learn_online(const std::vector<GrayImage>& images, const LearnConfig& cfg, const Dictionary& d0,
                         const SnapshotFn& on_snapshot = {});

}  // namespace spdl
