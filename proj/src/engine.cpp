#include "engine.hpp"

#include <chrono>
#include <cmath>

#include "errors.hpp"

namespace qsp {

using Eigen::MatrixXcd;

MatrixXcd build_u_phi(const WalkOperator& w, double phi, bool inverse_variant) {
  const Eigen::Index dw = w.w.rows();
  MatrixXcd id = MatrixXcd::Identity(dw, dw);
  MatrixXcd wop = inverse_variant ? MatrixXcd(w.w.adjoint()) : w.w;
  cplx off = std::polar(1.0, phi) * (inverse_variant ? -0.5 : 0.5);
  MatrixXcd u(2 * dw, 2 * dw);
  u.topLeftCorner(dw, dw) = 0.5 * (id + wop);
  u.bottomRightCorner(dw, dw) = 0.5 * (id + wop);
  u.topRightCorner(dw, dw) = std::conj(off) * (id - wop);
  u.bottomLeftCorner(dw, dw) = off * (id - wop);
  return u;
}

MatrixXcd build_v(const WalkOperator& w, const PhaseSequence& p) {
  const Eigen::Index dw = w.w.rows();
  MatrixXcd v = MatrixXcd::Identity(2 * dw, 2 * dw);
  for (int j = 0; j < p.length(); ++j)
    v = build_u_phi(w, p.phase(j), /*inverse_variant=*/j % 2 == 1) * v;
  return v;
}

MatrixXcd project_plus(const MatrixXcd& v) {
  const Eigen::Index dw = v.rows() / 2;
  return 0.5 * (v.topLeftCorner(dw, dw) + v.topRightCorner(dw, dw) +
                v.bottomLeftCorner(dw, dw) + v.bottomRightCorner(dw, dw));
}

MatrixXcd exact_evolution(const SparseHamiltonian& h, double t) {
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(h.dense());
  if (es.info() != Eigen::Success)
    throw Error(ErrorCode::internal, "eigensolve failed for H");
  Eigen::VectorXcd ph(es.eigenvalues().size());
  for (Eigen::Index i = 0; i < ph.size(); ++i)
    ph(i) = std::polar(1.0, -es.eigenvalues()(i) * t);
  return es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
}

double operator_distance(const MatrixXcd& a, const MatrixXcd& b) {
  MatrixXcd diff = a - b;
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(diff.adjoint() * diff);
  if (es.info() != Eigen::Success)
    throw Error(ErrorCode::internal, "eigensolve failed for distance");
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

SimulationReport simulate(const SparseHamiltonian& h, double time, double eps) {
  const auto t0 = std::chrono::steady_clock::now();
  if (time == 0 || !std::isfinite(time))
    throw Error(ErrorCode::invalid_argument, "time must be finite and nonzero");

  WalkOperator walk = build_walk(h);
  const double tau = walk.x * std::abs(time);
  TruncationPlan plan = choose_truncation(tau, eps);
  if (plan.n_queries > 64)
    throw Error(ErrorCode::cap_exceeded,
                "N cap exceeded: plan needs N = " + std::to_string(plan.n_queries));

  auto [a, c] = target_series(plan);
  // Negative time flips the sign of the odd part: e^{-i tau sin} -> conjugate.
  const double sgn = time >= 0 ? 1.0 : -1.0;
  if (sgn < 0) c = -1.0 * c;
  auto target = [tau, sgn](double th) { return -sgn * tau * std::sin(th); };

  SynthesisResult syn = synthesize(a, c, plan.eps_bound, target);

  MatrixXcd v = build_v(walk, syn.phases);
  MatrixXcd compressed = walk.t.adjoint() * project_plus(v) * walk.t;
  MatrixXcd exact = exact_evolution(h, time);

  SimulationReport rep;
  rep.tau = tau;
  rep.eps_target = eps;
  rep.q = plan.q;
  rep.n_queries = syn.phases.length();
  rep.q_lower = plan.q_lower;
  rep.gap_fourier = sup_norm_gap(a, c, target, 2048);
  rep.trace_distance = operator_distance(compressed, exact);
  rep.t_residual = walk.t_residual;
  rep.w_residual = walk.w_residual;
  rep.reconstruction_residual = walk.rec_residual;
  rep.phases = syn.phases.phases();

  // Stage unitarity defects.
  const Eigen::Index dw = walk.w.rows();
  for (int j = 0; j < syn.phases.length(); ++j) {
    MatrixXcd u = build_u_phi(walk, syn.phases.phase(j), j % 2 == 1);
    double r = (u.adjoint() * u - MatrixXcd::Identity(2 * dw, 2 * dw)).norm();
    rep.u_phi_residual_max = std::max(rep.u_phi_residual_max, r);
  }

  // On every walk eigenvector the staged product must act on the ancilla as
  // the scalar 2x2 response at that eigenphase.
  Eigen::ComplexEigenSolver<MatrixXcd> ws(walk.w);
  if (ws.info() != Eigen::Success)
    throw Error(ErrorCode::internal, "eigensolve failed for W");
  double min_success = 1e300;
  for (Eigen::Index i = 0; i < dw; ++i) {
    const Eigen::VectorXcd u = ws.eigenvectors().col(i);
    const double theta = std::arg(ws.eigenvalues()(i));
    Matrix2cd block;
    for (int aa = 0; aa < 2; ++aa)
      for (int bb = 0; bb < 2; ++bb)
        block(aa, bb) = (u.adjoint() * v.block(aa * dw, bb * dw, dw, dw) * u).value();
    rep.v_block_residual = std::max(
        rep.v_block_residual, (block - response_eval(syn.phases, theta)).norm());
    cplx onplus = 0.5 * (block(0, 0) + block(0, 1) + block(1, 0) + block(1, 1));
    min_success = std::min(min_success, std::norm(onplus));
  }
  min_success = std::min(min_success, syn.diag.min_success_prob);
  rep.success_prob_min = min_success;

  rep.bounds_ok = rep.trace_distance <= 8 * eps && rep.success_prob_min >= 1 - 16 * eps;
  rep.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

}  // namespace qsp
