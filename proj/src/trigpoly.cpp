#include "trigpoly.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "errors.hpp"

namespace qsp {

namespace {

void require_finite(const std::vector<double>& v) {
  for (double x : v)
    if (!std::isfinite(x)) throw Error(ErrorCode::invalid_argument, "non-finite coefficient");
}

}  // namespace

TrigSeries::TrigSeries(std::vector<double> cos_coeffs, std::vector<double> sin_coeffs) {
  require_finite(cos_coeffs);
  require_finite(sin_coeffs);
  if (cos_coeffs.empty()) cos_coeffs.push_back(0.0);
  std::size_t k = std::max(cos_coeffs.size(), sin_coeffs.size() + 1);
  cos_ = std::move(cos_coeffs);
  cos_.resize(k, 0.0);
  sin_.assign(k, 0.0);
  for (std::size_t i = 0; i < sin_coeffs.size(); ++i) sin_[i + 1] = sin_coeffs[i];
}

double TrigSeries::cos_coeff(int k) const {
  if (k < 0) throw Error(ErrorCode::invalid_argument, "negative harmonic index");
  return k < static_cast<int>(cos_.size()) ? cos_[k] : 0.0;
}

double TrigSeries::sin_coeff(int k) const {
  if (k < 1) throw Error(ErrorCode::invalid_argument, "sine harmonic index must be >= 1");
  return k < static_cast<int>(sin_.size()) ? sin_[k] : 0.0;
}

std::vector<double> TrigSeries::sin_coeffs() const {
  return std::vector<double>(sin_.begin() + 1, sin_.end());
}

double TrigSeries::eval(double theta) const {
  double acc = cos_[0];
  for (int k = 1; k <= half_degree(); ++k)
    acc += cos_[k] * std::cos(k * theta) + sin_[k] * std::sin(k * theta);
  return acc;
}

bool TrigSeries::is_cosine_type(double tol) const {
  for (double c : sin_)
    if (std::abs(c) > tol) return false;
  return true;
}

bool TrigSeries::is_sine_type(double tol) const {
  for (double a : cos_)
    if (std::abs(a) > tol) return false;
  return true;
}

double TrigSeries::max_abs_coeff() const {
  double m = 0;
  for (double a : cos_) m = std::max(m, std::abs(a));
  for (double c : sin_) m = std::max(m, std::abs(c));
  return m;
}

TrigSeries TrigSeries::trimmed(double rel_tol) const {
  double floor = rel_tol * max_abs_coeff();
  int k = half_degree();
  while (k > 0 && std::abs(cos_[k]) <= floor && std::abs(sin_[k]) <= floor) --k;
  TrigSeries out;
  out.cos_.assign(cos_.begin(), cos_.begin() + k + 1);
  out.sin_.assign(sin_.begin(), sin_.begin() + k + 1);
  return out;
}

void TrigSeries::set_cos_coeff(int k, double v) {
  if (k < 0) throw Error(ErrorCode::invalid_argument, "negative harmonic index");
  if (k >= static_cast<int>(cos_.size())) {
    cos_.resize(k + 1, 0.0);
    sin_.resize(k + 1, 0.0);
  }
  cos_[k] = v;
}

void TrigSeries::set_sin_coeff(int k, double v) {
  if (k < 1) throw Error(ErrorCode::invalid_argument, "sine harmonic index must be >= 1");
  if (k >= static_cast<int>(sin_.size())) {
    cos_.resize(k + 1, 0.0);
    sin_.resize(k + 1, 0.0);
  }
  sin_[k] = v;
}

TrigSeries operator+(const TrigSeries& f, const TrigSeries& g) {
  int k = std::max(f.half_degree(), g.half_degree());
  TrigSeries out;
  out.cos_.assign(k + 1, 0.0);
  out.sin_.assign(k + 1, 0.0);
  for (int i = 0; i <= k; ++i) {
    out.cos_[i] = f.cos_coeff(i) + g.cos_coeff(i);
    if (i >= 1) out.sin_[i] = f.sin_coeff(i) + g.sin_coeff(i);
  }
  return out;
}

TrigSeries operator-(const TrigSeries& f, const TrigSeries& g) { return f + (-1.0) * g; }

TrigSeries operator*(double s, const TrigSeries& f) {
  TrigSeries out = f;
  for (double& a : out.cos_) a *= s;
  for (double& c : out.sin_) c *= s;
  return out;
}

// ---------------------------------------------------------------------------
// LaurentPoly

LaurentPoly LaurentPoly::from_full_exponents(int lo, std::vector<cplx> coeffs) {
  return from_half_exponents(2 * lo, std::move(coeffs));
}

LaurentPoly LaurentPoly::from_half_exponents(int lo_half, std::vector<cplx> coeffs) {
  if (coeffs.empty()) coeffs.push_back(cplx(0, 0));
  LaurentPoly p;
  p.lo_half_ = lo_half;
  p.c_ = std::move(coeffs);
  for (const cplx& z : p.c_)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
      throw Error(ErrorCode::invalid_argument, "non-finite coefficient");
  return p;
}

cplx LaurentPoly::coeff_half(int k_half) const {
  int d = k_half - lo_half_;
  if (d < 0 || d % 2 != 0) return cplx(0, 0);
  int i = d / 2;
  return i < static_cast<int>(c_.size()) ? c_[i] : cplx(0, 0);
}

cplx LaurentPoly::coeff(int k_full) const { return coeff_half(2 * k_full); }

cplx LaurentPoly::eval(double theta) const {
  cplx acc(0, 0);
  for (int i = 0; i < n_terms(); ++i) {
    double e = 0.5 * (lo_half_ + 2 * i);
    acc += c_[i] * std::polar(1.0, e * theta);
  }
  return acc;
}

double LaurentPoly::max_abs_coeff() const {
  double m = 0;
  for (const cplx& z : c_) m = std::max(m, std::abs(z));
  return m;
}

LaurentPoly LaurentPoly::trimmed(double rel_tol) const {
  double floor = rel_tol * max_abs_coeff();
  int lo = 0, hi = n_terms() - 1;
  while (hi > lo && std::abs(c_[hi]) <= floor) --hi;
  while (lo < hi && std::abs(c_[lo]) <= floor) ++lo;
  LaurentPoly out;
  out.lo_half_ = lo_half_ + 2 * lo;
  out.c_.assign(c_.begin() + lo, c_.begin() + hi + 1);
  return out;
}

LaurentPoly operator+(const LaurentPoly& p, const LaurentPoly& q) {
  if ((p.lo_half_ - q.lo_half_) % 2 != 0)
    throw Error(ErrorCode::invalid_argument, "unsupported parity: cannot add half-step to whole-step");
  int lo = std::min(p.lo_half_, q.lo_half_);
  int hi = std::max(p.hi_half(), q.hi_half());
  std::vector<cplx> c((hi - lo) / 2 + 1, cplx(0, 0));
  for (int i = 0; i < p.n_terms(); ++i) c[(p.lo_half_ + 2 * i - lo) / 2] += p.c_[i];
  for (int i = 0; i < q.n_terms(); ++i) c[(q.lo_half_ + 2 * i - lo) / 2] += q.c_[i];
  return LaurentPoly::from_half_exponents(lo, std::move(c));
}

LaurentPoly operator*(const LaurentPoly& p, const LaurentPoly& q) {
  std::vector<cplx> c(p.n_terms() + q.n_terms() - 1, cplx(0, 0));
  for (int i = 0; i < p.n_terms(); ++i)
    for (int j = 0; j < q.n_terms(); ++j) c[i + j] += p.c_[i] * q.c_[j];
  return LaurentPoly::from_half_exponents(p.lo_half_ + q.lo_half_, std::move(c));
}

// ---------------------------------------------------------------------------
// Conversions and products

LaurentPoly to_laurent(const TrigSeries& f) {
  int k = f.half_degree();
  std::vector<cplx> c(2 * k + 1, cplx(0, 0));
  c[k] = cplx(f.cos_coeff(0), 0);
  for (int j = 1; j <= k; ++j) {
    // a cos + c sin = (a/2 - i c/2) w^j + (a/2 + i c/2) w^-j
    double a = f.cos_coeff(j), s = f.sin_coeff(j);
    c[k + j] = cplx(a / 2, -s / 2);
    c[k - j] = cplx(a / 2, s / 2);
  }
  return LaurentPoly::from_full_exponents(-k, std::move(c));
}

TrigSeries to_trig_series(const LaurentPoly& p, double imag_tol) {
  if (p.half_step())
    throw Error(ErrorCode::invalid_argument, "unsupported parity: half-step exponents");
  int k = std::max(std::abs(p.lo_half()), std::abs(p.hi_half())) / 2;
  double floor = imag_tol * std::max(1.0, p.max_abs_coeff());
  std::vector<double> a(k + 1, 0.0), c(k > 0 ? k : 0, 0.0);
  cplx z0 = p.coeff(0);
  if (std::abs(z0.imag()) > floor)
    throw Error(ErrorCode::invalid_argument, "imaginary residual in trig conversion");
  a[0] = z0.real();
  for (int j = 1; j <= k; ++j) {
    cplx sum = p.coeff(j) + p.coeff(-j);
    cplx dif = cplx(0, 1) * (p.coeff(j) - p.coeff(-j));
    if (std::abs(sum.imag()) > floor || std::abs(dif.imag()) > floor)
      throw Error(ErrorCode::invalid_argument, "imaginary residual in trig conversion");
    a[j] = sum.real();
    c[j - 1] = dif.real();
  }
  return TrigSeries(std::move(a), std::move(c));
}

TrigSeries multiply(const TrigSeries& f, const TrigSeries& g) {
  LaurentPoly prod = to_laurent(f) * to_laurent(g);
  // The convolution is exact in exponent range, so the conversion keeps the
  // full structural half-degree K1 + K2 even when top coefficients vanish.
  TrigSeries out = to_trig_series(prod, 1e-9);
  int k = f.half_degree() + g.half_degree();
  out.set_cos_coeff(k, out.cos_coeff(k));
  return out;
}

// ---------------------------------------------------------------------------
// Root finding

namespace {

// Parlett-Reinsch balancing: diagonal similarity with radix-2 powers to even
// out row/column norms before the eigensolve (the dense solver does not
// balance on its own, and companion matrices of high-degree series need it).
void balance_in_place(Eigen::MatrixXcd& a) {
  const double radix = 2.0, radix2 = radix * radix;
  const int n = static_cast<int>(a.rows());
  bool done = false;
  while (!done) {
    done = true;
    for (int i = 0; i < n; ++i) {
      double r = 0, c = 0;
      for (int j = 0; j < n; ++j)
        if (j != i) {
          c += std::abs(a(j, i));
          r += std::abs(a(i, j));
        }
      if (c == 0 || r == 0) continue;
      double g = r / radix, f = 1, s = c + r;
      while (c < g) {
        f *= radix;
        c *= radix2;
      }
      g = r * radix;
      while (c > g) {
        f /= radix;
        c /= radix2;
      }
      if ((c + r) / f < 0.95 * s) {
        done = false;
        double ginv = 1.0 / f;
        for (int j = 0; j < n; ++j) a(i, j) *= ginv;
        for (int j = 0; j < n; ++j) a(j, i) *= f;
      }
    }
  }
}

cplx horner(const std::vector<cplx>& c, cplx z) {
  cplx acc(0, 0);
  for (int i = static_cast<int>(c.size()) - 1; i >= 0; --i) acc = acc * z + c[i];
  return acc;
}

cplx horner_deriv(const std::vector<cplx>& c, cplx z) {
  cplx acc(0, 0);
  for (int i = static_cast<int>(c.size()) - 1; i >= 1; --i) acc = acc * z + double(i) * c[i];
  return acc;
}

double eval_scale(const std::vector<cplx>& c, cplx z) {
  double s = 0, p = 1, az = std::abs(z);
  for (const cplx& ci : c) {
    s += std::abs(ci) * p;
    p *= az;
  }
  return s;
}

}  // namespace

std::vector<cplx> poly_roots(const std::vector<cplx>& ascending) {
  std::vector<cplx> c = ascending;
  double scale = 0;
  for (const cplx& z : c) scale = std::max(scale, std::abs(z));
  if (scale == 0) throw Error(ErrorCode::invalid_argument, "zero polynomial");
  double floor = 1e-14 * scale;
  while (!c.empty() && std::abs(c.back()) <= floor) c.pop_back();
  std::size_t drop = 0;
  while (drop < c.size() && std::abs(c[drop]) <= floor) ++drop;
  c.erase(c.begin(), c.begin() + drop);
  if (c.size() <= 1) return {};

  const int n = static_cast<int>(c.size()) - 1;
  Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(n, n);
  for (int i = 1; i < n; ++i) comp(i, i - 1) = 1.0;
  for (int i = 0; i < n; ++i) comp(i, n - 1) = -c[i] / c[n];
  balance_in_place(comp);
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(comp, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success)
    throw Error(ErrorCode::internal, "companion eigensolve failed");

  std::vector<cplx> roots(es.eigenvalues().data(), es.eigenvalues().data() + n);
  for (cplx& r : roots) {
    // Newton refinement driven by step size rather than residual decrease:
    // near a root the residual is evaluation noise and comparing it is a coin
    // flip, while the step shrinks deterministically until convergence.
    double prev = std::numeric_limits<double>::infinity();
    for (int it = 0; it < 10; ++it) {
      cplx p = horner(c, r), dp = horner_deriv(c, r);
      if (std::abs(dp) == 0) break;
      cplx step = p / dp;
      double len = std::abs(step);
      if (!std::isfinite(len) || len > std::max(prev, 0.5 * (1.0 + std::abs(r)))) break;
      r -= step;
      if (len <= 4e-16 * (1.0 + std::abs(r))) break;
      prev = len;
    }
    double res = std::abs(horner(c, r));
    if (res > 1e-8 * std::max(eval_scale(c, r), 1e-300))
      throw Error(ErrorCode::internal, "root residual too large: " + std::to_string(res));
  }
  return roots;
}

std::vector<cplx> laurent_roots(const LaurentPoly& p) {
  if (p.half_step())
    throw Error(ErrorCode::invalid_argument, "unsupported parity: half-step exponents");
  if (p.max_abs_coeff() == 0) throw Error(ErrorCode::invalid_argument, "zero polynomial");
  std::vector<cplx> c;
  c.reserve(p.n_terms());
  for (int i = 0; i < p.n_terms(); ++i) c.push_back(p.coeff_half(p.lo_half() + 2 * i));
  return poly_roots(c);
}

// ---------------------------------------------------------------------------
// Grid diagnostics

int default_grid_size(int half_degree) { return std::max(1024, 8 * half_degree); }

double sup_norm_gap(const TrigSeries& A, const TrigSeries& C,
                    const std::function<double(double)>& target_phase, int grid_size) {
  int g = grid_size > 0 ? grid_size
                        : default_grid_size(std::max(A.half_degree(), C.half_degree()));
  double worst = 0;
  for (int i = 0; i < g; ++i) {
    double th = -pi + 2 * pi * i / g;
    cplx achieved(A.eval(th), C.eval(th));
    worst = std::max(worst, std::abs(achieved - std::polar(1.0, target_phase(th))));
  }
  return worst;
}

double unitarity_gap(const TrigSeries& A, const TrigSeries& B, const TrigSeries& C,
                     const TrigSeries& D, int grid_size) {
  int k = std::max(std::max(A.half_degree(), B.half_degree()),
                   std::max(C.half_degree(), D.half_degree()));
  int g = grid_size > 0 ? grid_size : default_grid_size(k);
  double worst = 0;
  for (int i = 0; i < g; ++i) {
    double th = -pi + 2 * pi * i / g;
    double a = A.eval(th), b = B.eval(th), c = C.eval(th), d = D.eval(th);
    worst = std::max(worst, std::abs(a * a + b * b + c * c + d * d - 1.0));
  }
  return worst;
}

}  // namespace qsp
