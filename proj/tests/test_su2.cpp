#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "su2.hpp"

using namespace qsp;
using Eigen::Matrix2cd;

namespace {

std::vector<double> random_phases(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> u(-pi, pi);
  std::vector<double> out(n);
  for (double& v : out) v = u(rng);
  return out;
}

}  // namespace

TEST_CASE("rot_matrix matches the exponential of the generator") {
  // R_phi(theta) = exp(-i theta/2 (cos phi sigma_x + sin phi sigma_y))
  Matrix2cd sx, sy;
  sx << 0, 1, 1, 0;
  sy << 0, cplx(0, -1), cplx(0, 1), 0;
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int rep = 0; rep < 25; ++rep) {
    double phi = u(rng), theta = u(rng);
    Matrix2cd gen = cplx(0, -theta / 2) * (std::cos(phi) * sx + std::sin(phi) * sy);
    Matrix2cd want = oracle::expm(gen);
    CHECK((rot_matrix(phi, theta) - want).norm() < 1e-13);
  }
}

TEST_CASE("rot_matrix frozen entries, unitarity, determinant") {
  Matrix2cd r = rot_matrix(0.0, pi);  // pure sigma_x half-turn
  CHECK(std::abs(r(0, 0)) < 1e-15);
  CHECK(std::abs(r(0, 1) - cplx(0, -1)) < 1e-15);
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int rep = 0; rep < 10; ++rep) {
    Matrix2cd m = rot_matrix(u(rng), u(rng));
    CHECK((m * m.adjoint() - Matrix2cd::Identity()).norm() < 1e-14);
    CHECK(std::abs(m.determinant() - cplx(1, 0)) < 1e-14);
  }
  // 4 pi periodicity with a sign flip at 2 pi
  CHECK((rot_matrix(0.7, 2 * pi) + Matrix2cd::Identity()).norm() < 1e-13);
  CHECK((rot_matrix(0.7, 4 * pi) - Matrix2cd::Identity()).norm() < 1e-13);
}

TEST_CASE("equal phases compound the rotation angle") {
  // N identical axes: |off-diagonal| = |sin(N theta / 2)|
  for (int n : {2, 6, 12}) {
    PhaseSequence p(std::vector<double>(n, 0.4));
    for (double theta : {0.3, 1.1, -2.5}) {
      Matrix2cd m = response_eval(p, theta);
      CHECK(std::abs(m(1, 0)) == doctest::Approx(std::abs(std::sin(n * theta / 2))).epsilon(1e-12));
    }
  }
}

TEST_CASE("phase normalization and parity guard") {
  CHECK(normalize_angle(3 * pi / 2) == doctest::Approx(-pi / 2));
  CHECK(normalize_angle(pi) == doctest::Approx(pi));
  CHECK(normalize_angle(-pi) == doctest::Approx(pi));
  CHECK(normalize_angle(0.25) == doctest::Approx(0.25));
  CHECK_THROWS_WITH(PhaseSequence({0.1, 0.2, 0.3}), doctest::Contains("unsupported parity"));
  PhaseSequence ok({3 * pi / 2, 0.0});
  CHECK(ok.phase(0) == doctest::Approx(-pi / 2));
}

TEST_CASE("response_series reproduces the response matrix pointwise") {
  std::mt19937_64 rng(314);
  for (int n : {2, 4, 8, 16, 32}) {
    PhaseSequence p(random_phases(rng, n));
    ResponseAbcd r = response_series(p);
    CHECK(r.half_degree() <= n / 2);
    for (double theta : oracle::theta_grid(128)) {
      Matrix2cd direct = response_eval(p, theta);
      CHECK((r.eval(theta) - direct).norm() < 1e-12 * n);
    }
  }
}

TEST_CASE("response components carry the right symmetry") {
  std::mt19937_64 rng(515);
  for (int rep = 0; rep < 6; ++rep) {
    PhaseSequence p(random_phases(rng, 10));
    ResponseAbcd r = response_series(p);
    CHECK(r.a.is_cosine_type(1e-12));
    CHECK(r.b.is_cosine_type(1e-12));
    CHECK(r.c.is_sine_type(1e-12));
    CHECK(r.d.is_sine_type(1e-12));
    // value at theta = 0 is the identity: A(0) = 1, B(0) = 0
    CHECK(r.a.eval(0.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(r.b.eval(0.0)) < 1e-12);
    // pointwise unitarity: A^2 + B^2 + C^2 + D^2 = 1
    CHECK(unitarity_gap(r.a, r.b, r.c, r.d) < 1e-10);
  }
}

TEST_CASE("Mat2Laurent::from_phases expands the product exactly") {
  std::mt19937_64 rng(616);
  for (int n : {2, 6, 14}) {
    std::vector<double> phases = random_phases(rng, n);
    Mat2Laurent m = Mat2Laurent::from_phases(phases);
    CHECK(m.deg() == n);
    PhaseSequence p(phases);
    for (double theta : oracle::theta_grid(64))
      CHECK((m.eval(theta) - response_eval(p, theta)).norm() < 1e-13 * n);
  }
}

TEST_CASE("Mat2Laurent::from_abcd inverts the series extraction") {
  std::mt19937_64 rng(717);
  PhaseSequence p(random_phases(rng, 12));
  ResponseAbcd r = response_series(p);
  Mat2Laurent m = Mat2Laurent::from_abcd(r);
  for (double theta : oracle::theta_grid(64))
    CHECK((m.eval(theta) - response_eval(p, theta)).norm() < 1e-11);
}

TEST_CASE("projector split of a single rotation") {
  std::mt19937_64 rng(818);
  std::uniform_real_distribution<double> u(-pi, pi);
  for (int rep = 0; rep < 10; ++rep) {
    double phi = u(rng);
    Matrix2cd e = proj_e(phi), f = proj_f(phi);
    // complementary rank-one projectors
    CHECK((e + f - Matrix2cd::Identity()).norm() < 1e-15);
    CHECK((e * e - e).norm() < 1e-15);
    CHECK((e * f).norm() < 1e-15);
    for (double theta : {0.37, -1.9}) {
      Matrix2cd want = std::polar(1.0, theta / 2) * e + std::polar(1.0, -theta / 2) * f;
      CHECK((rot_matrix(phi, theta) - want).norm() < 1e-14);
    }
  }
}
