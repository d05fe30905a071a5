#include "walk.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "errors.hpp"

namespace qsp {

double wrap_angle(double a) {
  double r = std::remainder(a, 2 * pi);
  if (r <= -pi) r += 2 * pi;
  return r;
}

SparseHamiltonian SparseHamiltonian::from_entries(int n, int d,
                                                  const std::vector<HamEntry>& entries,
                                                  bool hermitize) {
  if (n < 1 || n > 10) throw Error(ErrorCode::invalid_argument, "n must lie in 1..10");
  const int dim = 1 << n;
  if (d < 1 || d > dim)
    throw Error(ErrorCode::invalid_argument, "d must lie in 1..2^n");

  std::map<std::pair<int, int>, cplx> m;
  for (const HamEntry& e : entries) {
    if (e.row < 0 || e.row >= dim || e.col < 0 || e.col >= dim)
      throw Error(ErrorCode::parse, "parse error: index out of range");
    if (!m.emplace(std::make_pair(e.row, e.col), e.value).second)
      throw Error(ErrorCode::parse, "parse error: duplicate entry");
  }

  // Hermitian closure: every stored (j,k) needs a conjugate partner.
  for (auto& [jk, v] : m) {
    auto [j, k] = jk;
    if (j == k) {
      if (std::abs(v.imag()) > 1e-12 * std::max(1.0, std::abs(v)))
        throw Error(ErrorCode::not_hermitian, "not Hermitian: complex diagonal");
      v = cplx(v.real(), 0.0);
      continue;
    }
    auto it = m.find({k, j});
    if (it == m.end()) {
      if (!hermitize)
        throw Error(ErrorCode::not_hermitian, "not Hermitian: missing conjugate entry");
      m.emplace(std::make_pair(k, j), std::conj(v));
    } else if (std::abs(it->second - std::conj(v)) >
               1e-12 * std::max(1.0, std::abs(v))) {
      throw Error(ErrorCode::not_hermitian, "not Hermitian: conjugate mismatch");
    }
  }

  SparseHamiltonian h;
  h.n_ = n;
  h.d_ = d;
  h.dense_ = Eigen::MatrixXcd::Zero(dim, dim);
  std::vector<std::vector<int>> cols(dim);
  for (const auto& [jk, v] : m) {
    if (v == cplx(0, 0)) continue;
    auto [j, k] = jk;
    h.entries_.push_back({j, k, v});
    h.dense_(j, k) = v;
    cols[j].push_back(k);
    h.h_max_ = std::max(h.h_max_, std::abs(v));
  }
  if (h.h_max_ == 0) throw Error(ErrorCode::zero_hamiltonian, "zero Hamiltonian");

  h.slots_.resize(dim);
  for (int j = 0; j < dim; ++j) {
    if (static_cast<int>(cols[j].size()) > d)
      throw Error(ErrorCode::sparsity_exceeded,
                  "sparsity exceeded: row " + std::to_string(j) + " has " +
                      std::to_string(cols[j].size()) + " entries");
    std::sort(cols[j].begin(), cols[j].end());
    h.slots_[j] = cols[j];
    // Pad with unused columns scanned cyclically from j so each slot is a
    // distinct column (duplicated slots would break the isometry norm).
    std::vector<bool> used(dim, false);
    for (int c : cols[j]) used[c] = true;
    for (int probe = j; static_cast<int>(h.slots_[j].size()) < d; probe = (probe + 1) % dim)
      if (!used[probe]) {
        used[probe] = true;
        h.slots_[j].push_back(probe);
      }
  }
  return h;
}

cplx SparseHamiltonian::entry(int j, int k) const {
  const int dim = 1 << n_;
  if (j < 0 || j >= dim || k < 0 || k >= dim)
    throw Error(ErrorCode::invalid_argument, "index out of range");
  return dense_(j, k);
}

int SparseHamiltonian::oracle_f(int j, int l) const {
  if (j < 0 || j >= dim() || l < 0 || l >= d_)
    throw Error(ErrorCode::invalid_argument, "index out of range");
  return slots_[j][l];
}

Eigen::MatrixXcd SparseHamiltonian::dense() const { return dense_; }

// ---------------------------------------------------------------------------

WalkOperator build_walk(const SparseHamiltonian& h) {
  const int n = h.qubits();
  if (n > 4)
    throw Error(ErrorCode::cap_exceeded, "walk dimension cap exceeded (n <= 4)");
  const int dim = h.dim();
  const int reg = 2 * dim;        // (n+1)-qubit register, flag in the top bit
  const int full = reg * reg;     // two registers
  const double x = h.sparsity() * h.h_max();
  const double gamma = 1.0 / std::sqrt(h.sparsity() * h.h_max());

  auto idx = [reg](int r1, int r2) { return r1 * reg + r2; };

  // T|j> spreads row j over its d slot columns.  Off-diagonal slots carry the
  // paired square root of the entry at flag (0,0) plus a norm filler at
  // (0,1); the diagonal slot splits |H_jj| between (0,1) and (1,0) so that
  // the swap overlap reproduces the signed value (a flag-(0,0) amplitude
  // could only ever contribute |amp|^2 >= 0 on the diagonal).
  Eigen::MatrixXcd t = Eigen::MatrixXcd::Zero(full, dim);
  for (int j = 0; j < dim; ++j) {
    for (int l = 0; l < h.sparsity(); ++l) {
      int k = h.oracle_f(j, l);
      cplx v = h.entry(j, k);
      if (k == j) {
        double rho = std::abs(v.real());
        double beta = 0.5 * std::asin(std::min(1.0, rho / h.h_max()));
        double sigma = v.real() < 0 ? -1.0 : 1.0;
        double amp = gamma * std::sqrt(h.h_max());
        t(idx(j, dim + j), j) += amp * std::cos(beta);
        t(idx(dim + j, j), j) += sigma * amp * std::sin(beta);
      } else {
        // One principal square root per unordered pair keeps the product of
        // the two conjugated amplitudes equal to the entry itself even for
        // negative real values.
        cplx alpha = (j < k) ? std::conj(std::sqrt(v)) : std::sqrt(h.entry(k, j));
        t(idx(j, k), j) += gamma * alpha;
        t(idx(j, dim + k), j) += gamma * std::sqrt(h.h_max() - std::abs(v));
      }
    }
  }

  Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(full, full);
  for (int r1 = 0; r1 < reg; ++r1)
    for (int r2 = 0; r2 < reg; ++r2) s(idx(r2, r1), idx(r1, r2)) = 1.0;

  Eigen::MatrixXcd refl = 2.0 * (t * t.adjoint()) - Eigen::MatrixXcd::Identity(full, full);
  WalkOperator w;
  w.t = t;
  w.s = s;
  w.w = cplx(0, 1) * (s * refl);
  w.x = x;
  w.n = n;
  w.t_residual = (t.adjoint() * t - Eigen::MatrixXcd::Identity(dim, dim)).norm();
  w.rec_residual = (x * (t.adjoint() * (s * t)) - h.dense()).norm();
  w.w_residual =
      (w.w.adjoint() * w.w - Eigen::MatrixXcd::Identity(full, full)).norm();
  return w;
}

EigenphaseReport eigenphase_check(const SparseHamiltonian& h, const WalkOperator& w) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> hs(h.dense());
  if (hs.info() != Eigen::Success)
    throw Error(ErrorCode::internal, "eigensolve failed for H");
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> ws(w.w, /*computeEigenvectors=*/false);
  if (ws.info() != Eigen::Success)
    throw Error(ErrorCode::internal, "eigensolve failed for W");
  std::vector<double> actual(ws.eigenvalues().size());
  for (Eigen::Index i = 0; i < ws.eigenvalues().size(); ++i)
    actual[i] = std::arg(ws.eigenvalues()(i));

  auto nearest = [&](double pred) {
    double best = 1e300;
    for (double a : actual) best = std::min(best, std::abs(wrap_angle(pred - a)));
    return best;
  };

  EigenphaseReport rep;
  rep.reconstruction_residual = w.rec_residual;
  for (Eigen::Index i = 0; i < hs.eigenvalues().size(); ++i) {
    EigenphaseRow row;
    row.lambda = hs.eigenvalues()(i);
    double ratio = std::clamp(row.lambda / w.x, -1.0, 1.0);
    row.theta_plus = std::asin(ratio);
    row.theta_minus = wrap_angle(pi - std::asin(ratio));
    row.dev_plus = nearest(row.theta_plus);
    row.dev_minus = nearest(row.theta_minus);
    rep.max_deviation =
        std::max(rep.max_deviation, std::max(row.dev_plus, row.dev_minus));
    rep.rows.push_back(row);
  }
  if (rep.max_deviation > 1e-6)
    throw Error(ErrorCode::bound_violation,
                "unmatched eigenphase: deviation " + std::to_string(rep.max_deviation));
  return rep;
}

}  // namespace qsp
