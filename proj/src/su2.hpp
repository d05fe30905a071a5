#pragma once
#include <Eigen/Dense>
#include <vector>

#include "trigpoly.hpp"

namespace qsp {

using Eigen::Matrix2cd;

// Ordered list of rotation-axis angles phi_1..phi_N, normalized into
// (-pi, pi].  The even-length restriction keeps the composite response free
// of the half-angle prefactor when adjacent stages alternate between the
// forward and inverse single-stage operators.
class PhaseSequence {
public:
  PhaseSequence() = default;
  explicit PhaseSequence(std::vector<double> phases);

  int length() const { return static_cast<int>(phases_.size()); }
  bool empty() const { return phases_.empty(); }
  double phase(int i) const { return phases_.at(i); }  // 0-based
  const std::vector<double>& phases() const { return phases_; }

private:
  std::vector<double> phases_;
};

double normalize_angle(double phi);  // into (-pi, pi]

// R_phi(theta): rotation by theta about the equatorial axis at azimuth phi.
Matrix2cd rot_matrix(double phi, double theta);

// Composite response R_{phi_N}(theta) ... R_{phi_1}(theta).
Matrix2cd response_eval(const PhaseSequence& p, double theta);

// Expansion of a composite response as A + i B sigma_z + i C sigma_x
// + i D sigma_y with A, B cosine-type and C, D sine-type polynomials of
// half-degree at most N/2.
struct ResponseAbcd {
  TrigSeries a, b, c, d;
  Matrix2cd eval(double theta) const;
  int half_degree() const;
};

ResponseAbcd response_series(const PhaseSequence& p);

// 2x2-matrix-valued Laurent polynomial in u = e^{i theta/2}; coefficient i
// carries exponent -deg + 2i.  This is the workhorse representation for both
// building a response from phases and stripping phases back off.
struct Mat2Laurent {
  std::vector<Matrix2cd> coef;

  int deg() const { return static_cast<int>(coef.size()) - 1; }
  Matrix2cd eval(double theta) const;
  double max_coeff_norm() const;

  static Mat2Laurent identity();
  static Mat2Laurent from_phases(const std::vector<double>& phases);
  static Mat2Laurent from_abcd(const ResponseAbcd& r);
};

// Complementary rank-one projectors splitting R_phi(theta) into
// E_phi e^{i theta/2} + F_phi e^{-i theta/2}.
Matrix2cd proj_e(double phi);
Matrix2cd proj_f(double phi);

}  // namespace qsp
