#pragma once

#include <cstdint>
#include <vector>

#include "tlb/graph.hpp"

namespace tlb {

// Dense row-major square matrix.
class Matrix {
 public:
  Matrix() = default;
  explicit Matrix(std::size_t n, double fill = 0.0) : n_(n), data_(n * n, fill) {}

  std::size_t size() const noexcept { return n_; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * n_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * n_ + c]; }

 private:
  std::size_t n_ = 0;
  std::vector<double> data_;
};

struct WalkAnalysis {
  std::vector<double> pi;
  std::vector<double> eigenvalues;  // of D^{-1/2} A D^{-1/2}, non-increasing
  double mu = 0.0;
  std::uint64_t mix_time = 0;
  Matrix hitting;
  double max_hitting = 0.0;
  bool bipartite = false;
};

// Eigenvalues with |lambda| >= 1 - kUnitModulusTolerance count as modulus one.
inline constexpr double kUnitModulusTolerance = 1e-9;

Matrix transition_matrix(const Graph& g);
std::vector<double> stationary(const Graph& g);

// Cyclic Jacobi rotations on a symmetric matrix. Stops when the off-diagonal
// Frobenius norm drops below `tolerance`; throws Error(numeric) after `max_sweeps`.
std::vector<double> symmetric_eigenvalues(Matrix a, double tolerance = 1e-10, int max_sweeps = 100);

// Spectrum of the symmetrized walk matrix N = D^{-1/2} A D^{-1/2}, non-increasing.
std::vector<double> walk_spectrum(const Graph& g);

// 1 - max{|lambda_i| : i >= 2, |lambda_i| < 1}; an empty candidate set gives 1.
double spectral_gap(const Graph& g);
double spectral_gap_from_spectrum(const std::vector<double>& eigenvalues);

// ceil(4 ln n / mu)
std::uint64_t mixing_time(std::size_t n, double mu);
std::uint64_t mixing_time(const Graph& g);

// H(u, v): expected steps for a walk from u to first reach v.
Matrix hitting_times(const Graph& g);
double max_entry(const Matrix& m);

// Row `start` of P^t.
std::vector<double> walk_distribution(const Graph& g, NodeId start, std::uint64_t t);

struct MixingLemmaReport {
  std::uint64_t t = 0;
  double max_deviation = 0.0;  // over all (u, v) and, for bipartite graphs, over t and t+1
  double bound = 0.0;          // n^-3
  bool pass = false;
};

// Checks P^t(u, v) against pi(v) (non-bipartite) or the parity-dependent
// prediction pi(v) * (1 + (-1)^{t or t+1}) (bipartite) at t = MIX(G).
MixingLemmaReport verify_mixing_lemma(const Graph& g);

WalkAnalysis analyze(const Graph& g);

}  // namespace tlb
