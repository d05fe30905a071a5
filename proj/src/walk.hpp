#pragma once
#include <Eigen/Dense>
#include <vector>

#include "trigpoly.hpp"

namespace qsp {

struct HamEntry {
  int row = 0;
  int col = 0;
  cplx value{0, 0};
};

// Dense-backed d-sparse Hermitian operator on n qubits with the neighbor
// oracle view f(j, l) used by the walk construction.  Rows with fewer than d
// stored columns are padded with distinct spare columns, starting at the row
// index itself, so that every row exposes exactly d slots.
class SparseHamiltonian {
public:
  static SparseHamiltonian from_entries(int n, int d, const std::vector<HamEntry>& entries,
                                        bool hermitize);

  int qubits() const { return n_; }
  int dim() const { return 1 << n_; }
  int sparsity() const { return d_; }
  double h_max() const { return h_max_; }

  cplx entry(int j, int k) const;
  int oracle_f(int j, int l) const;  // l-th slot column of row j, 0 <= l < d
  const std::vector<HamEntry>& entries() const { return entries_; }
  Eigen::MatrixXcd dense() const;

private:
  int n_ = 0, d_ = 0;
  double h_max_ = 0;
  std::vector<HamEntry> entries_;           // both triangles, row-major sorted
  std::vector<std::vector<int>> slots_;     // per-row slot columns incl. padding
  Eigen::MatrixXcd dense_;
};

// Discrete-time walk W = i S (2 T T^dag - 1) acting on two (n+1)-qubit
// registers (flag = most significant bit of each register), with T the
// state-preparation isometry and S the register swap.
struct WalkOperator {
  Eigen::MatrixXcd t;  // 2^(2n+2) x 2^n isometry
  Eigen::MatrixXcd s;  // register swap
  Eigen::MatrixXcd w;
  double x = 0;  // d * h_max
  int n = 0;
  double t_residual = 0;    // ||T^dag T - I||_F
  double rec_residual = 0;  // ||x T^dag S T - H||_F
  double w_residual = 0;    // ||W^dag W - I||_F
};

WalkOperator build_walk(const SparseHamiltonian& h);

struct EigenphaseRow {
  double lambda = 0;
  double theta_plus = 0;   // arcsin(lambda/x)
  double theta_minus = 0;  // pi - arcsin(lambda/x), wrapped to (-pi, pi]
  double dev_plus = 0;     // distance to the nearest actual walk eigenphase
  double dev_minus = 0;
};

struct EigenphaseReport {
  double max_deviation = 0;
  double reconstruction_residual = 0;
  std::vector<EigenphaseRow> rows;
};

// Confirms that each eigenvalue lambda of H appears in the walk spectrum at
// the two predicted eigenphases.  Deviations beyond 1e-6 raise
// "unmatched eigenphase".
EigenphaseReport eigenphase_check(const SparseHamiltonian& h, const WalkOperator& w);

double wrap_angle(double a);  // into (-pi, pi]

}  // namespace qsp
