#include "su2.hpp"

#include <cmath>

#include "errors.hpp"

namespace qsp {

namespace {
const cplx I_UNIT(0, 1);
}

double normalize_angle(double phi) {
  double r = std::remainder(phi, 2 * pi);
  if (r <= -pi) r += 2 * pi;
  return r;
}

PhaseSequence::PhaseSequence(std::vector<double> phases) {
  if (phases.size() % 2 != 0)
    throw Error(ErrorCode::invalid_argument,
                "unsupported parity: phase sequence length must be even");
  for (double& p : phases) {
    if (!std::isfinite(p)) throw Error(ErrorCode::invalid_argument, "non-finite phase");
    p = normalize_angle(p);
  }
  phases_ = std::move(phases);
}

Matrix2cd rot_matrix(double phi, double theta) {
  double ch = std::cos(theta / 2), sh = std::sin(theta / 2);
  Matrix2cd r;
  r(0, 0) = ch;
  r(0, 1) = -I_UNIT * std::polar(1.0, -phi) * sh;
  r(1, 0) = -I_UNIT * std::polar(1.0, phi) * sh;
  r(1, 1) = ch;
  return r;
}

Matrix2cd response_eval(const PhaseSequence& p, double theta) {
  Matrix2cd v = Matrix2cd::Identity();
  for (int i = 0; i < p.length(); ++i) v = rot_matrix(p.phase(i), theta) * v;
  return v;
}

Matrix2cd proj_e(double phi) {
  Matrix2cd e;
  e(0, 0) = 0.5;
  e(0, 1) = -0.5 * std::polar(1.0, -phi);
  e(1, 0) = -0.5 * std::polar(1.0, phi);
  e(1, 1) = 0.5;
  return e;
}

Matrix2cd proj_f(double phi) {
  Matrix2cd f;
  f(0, 0) = 0.5;
  f(0, 1) = 0.5 * std::polar(1.0, -phi);
  f(1, 0) = 0.5 * std::polar(1.0, phi);
  f(1, 1) = 0.5;
  return f;
}

// ---------------------------------------------------------------------------
// Mat2Laurent

Matrix2cd Mat2Laurent::eval(double theta) const {
  Matrix2cd acc = Matrix2cd::Zero();
  int d = deg();
  for (int i = 0; i <= d; ++i) acc += coef[i] * std::polar(1.0, (-d + 2 * i) * theta / 2);
  return acc;
}

double Mat2Laurent::max_coeff_norm() const {
  double m = 0;
  for (const Matrix2cd& c : coef) m = std::max(m, c.norm());
  return m;
}

Mat2Laurent Mat2Laurent::identity() { return Mat2Laurent{{Matrix2cd::Identity()}}; }

Mat2Laurent Mat2Laurent::from_phases(const std::vector<double>& phases) {
  Mat2Laurent v = identity();
  for (double phi : phases) {
    // left-multiply by R_phi = E u + F u^{-1}
    Matrix2cd e = proj_e(phi), f = proj_f(phi);
    std::vector<Matrix2cd> next(v.coef.size() + 1, Matrix2cd::Zero());
    for (std::size_t i = 0; i < v.coef.size(); ++i) {
      next[i + 1] += e * v.coef[i];
      next[i] += f * v.coef[i];
    }
    v.coef = std::move(next);
  }
  return v;
}

Mat2Laurent Mat2Laurent::from_abcd(const ResponseAbcd& r) {
  int k = r.half_degree();
  Mat2Laurent m;
  m.coef.assign(2 * k + 1, Matrix2cd::Zero());
  auto add = [&](int harmonic, const Matrix2cd& plus, const Matrix2cd& minus) {
    m.coef[k + harmonic] += plus;
    m.coef[k - harmonic] += minus;
  };
  Matrix2cd id = Matrix2cd::Identity();
  Matrix2cd sz, sx, sy;
  sz << 1, 0, 0, -1;
  sx << 0, 1, 1, 0;
  sy << 0, -I_UNIT, I_UNIT, 0;
  add(0, r.a.cos_coeff(0) * id + I_UNIT * r.b.cos_coeff(0) * sz, Matrix2cd::Zero());
  for (int j = 1; j <= k; ++j) {
    // cos(j th) = (w^j + w^-j)/2, sin(j th) = (w^j - w^-j)/(2i), w = u^2,
    // so i sin(j th) contributes +1/2 at w^j and -1/2 at w^-j.
    cplx ca(r.a.cos_coeff(j) / 2, 0);
    cplx cb = I_UNIT * r.b.cos_coeff(j) / 2.0;
    cplx cc(r.c.sin_coeff(j) / 2, 0);
    cplx cd(r.d.sin_coeff(j) / 2, 0);
    add(j, ca * id + cb * sz + cc * sx + cd * sy, ca * id + cb * sz - cc * sx - cd * sy);
  }
  return m;
}

// ---------------------------------------------------------------------------
// Response series

Matrix2cd ResponseAbcd::eval(double theta) const {
  double av = a.eval(theta), bv = b.eval(theta);
  double cv = c.eval(theta), dv = d.eval(theta);
  // A + i B sz + i C sx + i D sy
  Matrix2cd m;
  m(0, 0) = cplx(av, bv);
  m(0, 1) = cplx(dv, cv);
  m(1, 0) = cplx(-dv, cv);
  m(1, 1) = cplx(av, -bv);
  return m;
}

int ResponseAbcd::half_degree() const {
  return std::max(std::max(a.half_degree(), b.half_degree()),
                  std::max(c.half_degree(), d.half_degree()));
}

ResponseAbcd response_series(const PhaseSequence& p) {
  if (p.length() % 2 != 0)
    throw Error(ErrorCode::invalid_argument, "unsupported parity: N must be even");
  Mat2Laurent v = Mat2Laurent::from_phases(p.phases());
  int n = p.length(), k = n / 2;
  // Even length means every exponent -n..n of step 2 is an even multiple of
  // 1/2, i.e. harmonics 0..k in theta.
  std::vector<double> a(k + 1, 0), b(k + 1, 0), c(k, 0), d(k, 0);
  Matrix2cd sz, sx, sy;
  sz << 1, 0, 0, -1;
  sx << 0, 1, 1, 0;
  sy << 0, -I_UNIT, I_UNIT, 0;
  auto at = [&](int harmonic) -> Matrix2cd {
    return v.coef[k + harmonic];  // exponent 2*harmonic in half-units of theta
  };
  for (int j = 0; j <= k; ++j) {
    Matrix2cd plus = at(j);
    Matrix2cd minus = j == 0 ? Matrix2cd::Zero() : at(-j);
    // Invert the harmonic layout used in Mat2Laurent::from_abcd.
    cplx alpha_p = 0.5 * (plus(0, 0) + plus(1, 1));
    cplx beta_p = 0.5 * (plus(0, 0) - plus(1, 1));
    cplx gamma_p = 0.5 * (plus(0, 1) + plus(1, 0));
    cplx delta_p = 0.5 * I_UNIT * (plus(0, 1) - plus(1, 0));
    cplx alpha_m = 0.5 * (minus(0, 0) + minus(1, 1));
    cplx beta_m = 0.5 * (minus(0, 0) - minus(1, 1));
    cplx gamma_m = 0.5 * (minus(0, 1) + minus(1, 0));
    cplx delta_m = 0.5 * I_UNIT * (minus(0, 1) - minus(1, 0));
    if (j == 0) {
      a[0] = alpha_p.real();
      b[0] = beta_p.imag();
    } else {
      a[j] = (alpha_p + alpha_m).real();
      b[j] = (beta_p + beta_m).imag();
      // i C sigma_x at harmonic j contributes +(c_j/2) sx at +j, -(c_j/2) at -j
      c[j - 1] = (gamma_p - gamma_m).real();
      d[j - 1] = (delta_p - delta_m).real();
    }
  }
  return ResponseAbcd{TrigSeries(std::move(a)), TrigSeries(std::move(b)),
                      TrigSeries({0.0}, std::move(c)), TrigSeries({0.0}, std::move(d))};
}

}  // namespace qsp
