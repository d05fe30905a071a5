#pragma once
#include <complex>
#include <functional>
#include <vector>

namespace qsp {

using cplx = std::complex<double>;

inline constexpr double pi = 3.14159265358979323846264338327950288;

// Real trigonometric polynomial  f(theta) = sum_{k=0}^K a_k cos(k theta)
//                                         + sum_{k=1}^K c_k sin(k theta).
// Coefficients are stored dense up to the half-degree K; a series is
// "cosine-type" when every sine coefficient vanishes and "sine-type" when
// a_0 and every cosine coefficient vanish.
class TrigSeries {
public:
  TrigSeries() : cos_(1, 0.0), sin_(1, 0.0) {}
  // cos_coeffs lists a_0..a_K; sin_coeffs lists c_1..c_L.  The shorter list is
  // zero-padded so both views share one half-degree.
  explicit TrigSeries(std::vector<double> cos_coeffs, std::vector<double> sin_coeffs = {});

  static TrigSeries constant(double a0) { return TrigSeries({a0}); }

  int half_degree() const { return static_cast<int>(cos_.size()) - 1; }
  double cos_coeff(int k) const;  // a_k (0 for k beyond the stored degree)
  double sin_coeff(int k) const;  // c_k, defined for k >= 1
  std::vector<double> cos_coeffs() const { return cos_; }
  std::vector<double> sin_coeffs() const;  // c_1..c_K

  double eval(double theta) const;
  bool is_cosine_type(double tol = 0.0) const;
  bool is_sine_type(double tol = 0.0) const;

  // Drops trailing harmonics whose coefficients are below rel_tol times the
  // largest coefficient magnitude.
  TrigSeries trimmed(double rel_tol = 1e-14) const;
  double max_abs_coeff() const;

  void set_cos_coeff(int k, double v);
  void set_sin_coeff(int k, double v);

  friend TrigSeries operator+(const TrigSeries& f, const TrigSeries& g);
  friend TrigSeries operator-(const TrigSeries& f, const TrigSeries& g);
  friend TrigSeries operator*(double s, const TrigSeries& f);

private:
  std::vector<double> cos_;  // index k -> a_k
  std::vector<double> sin_;  // index k -> c_k with sin_[0] fixed to 0
};

// Laurent polynomial p(w) = sum_k c_k w^k in w = e^{i theta}, where the
// exponents k may be integers or, after multiplication by the half-angle
// factor e^{i theta/2}, odd multiples of 1/2.  Exponents are stored in
// half-units with a common parity: term i carries exponent (lo_half + 2i)/2.
class LaurentPoly {
public:
  LaurentPoly() : lo_half_(0), c_(1, cplx(0, 0)) {}

  static LaurentPoly from_full_exponents(int lo, std::vector<cplx> coeffs);
  static LaurentPoly from_half_exponents(int lo_half, std::vector<cplx> coeffs);

  // True when the exponents are odd multiples of 1/2.
  bool half_step() const { return (lo_half_ % 2) != 0; }
  int lo_half() const { return lo_half_; }
  int hi_half() const { return lo_half_ + 2 * (static_cast<int>(c_.size()) - 1); }
  int n_terms() const { return static_cast<int>(c_.size()); }

  cplx coeff_half(int k_half) const;  // coefficient of exponent k_half/2
  cplx coeff(int k_full) const;       // coefficient of integer exponent k_full

  cplx eval(double theta) const;
  LaurentPoly trimmed(double rel_tol = 1e-14) const;
  double max_abs_coeff() const;

  friend LaurentPoly operator+(const LaurentPoly& p, const LaurentPoly& q);
  friend LaurentPoly operator*(const LaurentPoly& p, const LaurentPoly& q);

private:
  int lo_half_;          // lowest exponent in half-units
  std::vector<cplx> c_;  // ascending by one full unit (two half-units)
};

// Product of two trigonometric polynomials; the result has half-degree
// exactly K1 + K2 (top coefficients may be zero but are kept).
TrigSeries multiply(const TrigSeries& f, const TrigSeries& g);

// Exact basis change cos/sin <-> e^{ik theta}.
LaurentPoly to_laurent(const TrigSeries& f);
// Inverse map; imaginary parts of the incoming coefficients must stay below
// imag_tol times the coefficient scale or the conversion refuses.
TrigSeries to_trig_series(const LaurentPoly& p, double imag_tol = 1e-12);

// Roots of w^K p(w) viewed as an ordinary polynomial, for integer-exponent p.
// All-zero input raises "zero polynomial".  Roots come from a balanced
// companion matrix followed by a guarded Newton polish; each returned r
// satisfies |p(r)| <= 1e-8 * sum_i |c_i| |r|^i.
std::vector<cplx> laurent_roots(const LaurentPoly& p);

// Roots of an ordinary polynomial with ascending coefficients. Negligible
// leading/trailing coefficients are trimmed first (trailing trim discards
// roots at the origin).
std::vector<cplx> poly_roots(const std::vector<cplx>& ascending);

// max over a uniform theta grid of |A(theta) + i C(theta) - e^{i h(theta)}|.
// A grid_size of 0 selects max(1024, 8 * half_degree).
double sup_norm_gap(const TrigSeries& A, const TrigSeries& C,
                    const std::function<double(double)>& target_phase, int grid_size = 0);

// Uniform grid max of |A^2 + B^2 + C^2 + D^2 - 1|.
double unitarity_gap(const TrigSeries& A, const TrigSeries& B, const TrigSeries& C,
                     const TrigSeries& D, int grid_size = 0);

int default_grid_size(int half_degree);

}  // namespace qsp
