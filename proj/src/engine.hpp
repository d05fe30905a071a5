#pragma once
#include <Eigen/Dense>

#include "jacobi.hpp"
#include "phasefind.hpp"
#include "walk.hpp"

namespace qsp {

// Single query stage on (ancilla) x (walk space): ancilla-controlled
// application of the walk.  The inverse variant realizes the adjoint stage
// whose ancilla block carries the opposite half-angle prefactor, so that
// alternating stages leave a prefactor-free composite response.
Eigen::MatrixXcd build_u_phi(const WalkOperator& w, double phi, bool inverse_variant);

// Alternating product over the phase sequence: stage 1 (forward) is applied
// first, i.e. rightmost in the matrix product.
Eigen::MatrixXcd build_v(const WalkOperator& w, const PhaseSequence& p);

// Ancilla |+><+| compression: the average of the four ancilla blocks.
Eigen::MatrixXcd project_plus(const Eigen::MatrixXcd& v);

Eigen::MatrixXcd exact_evolution(const SparseHamiltonian& h, double t);

// Largest singular value of (a - b).
double operator_distance(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b);

struct SimulationReport {
  double tau = 0;
  double eps_target = 0;
  int q = 0;
  int n_queries = 0;  // number of stages actually applied
  int q_lower = 0;
  double gap_fourier = 0;        // truncated-series gap to e^{-i tau sin theta}
  double trace_distance = 0;     // operator distance of the compressed map to e^{-iHt}
  double success_prob_min = 0;   // min |<+|V|+>|^2 over grid and walk eigenphases
  double wall_time_s = 0;
  // Contract residuals
  double t_residual = 0;
  double w_residual = 0;
  double u_phi_residual_max = 0;  // max stage unitarity defect (Frobenius)
  double v_block_residual = 0;    // eigenvector block vs 2x2 response
  double reconstruction_residual = 0;
  bool bounds_ok = false;
  std::vector<double> phases;
};

// End-to-end simulation of e^{-iHt}: plan the truncation for
// tau = d h_max |t|, synthesize phases, build the walk and the staged
// product, compress, and compare against the exact evolution.
SimulationReport simulate(const SparseHamiltonian& h, double time, double eps);

}  // namespace qsp
