#pragma once
#include <utility>
#include <vector>

#include "trigpoly.hpp"

namespace qsp {

// Query budget chosen for approximating e^{-i tau sin(theta)} by a truncated
// Bessel expansion: harmonics 0..q-1 are kept, which costs N = 2(q-1)
// queries, and the tail obeys eps_bound = 4 (tau/2)^q / q!.
struct TruncationPlan {
  double tau = 0;
  int q = 0;
  int n_queries = 0;  // N = 2(q-1)
  double eps_target = 0;
  double eps_bound = 0;
  int q_lower = 0;
};

// J_0(tau)..J_kmax(tau) by Miller's backward recurrence, normalized with
// J_0 + 2 sum_{k even} J_k = 1.
std::vector<double> bessel_j(int k_max, double tau);

// Tail of the expansion after dropping harmonics >= q.
double truncation_bound(double tau, int q);

// Smallest q with q >= ceil(tau) + 1 and truncation_bound(tau, q) <= eps.
TruncationPlan choose_truncation(double tau, double eps);

// Largest q for which eps < |sin(tau/q)|^q / 2, i.e. a budget that provably
// cannot reach accuracy eps; any achieving q must exceed it.
int lower_bound_q(double tau, double eps);

// Cosine/sine pair (A, C) with A + iC ~ e^{-i tau sin theta}:
// A = J_0 + 2 sum_{even k>0} J_k cos(k theta), truncated below q,
// C = -2 sum_{odd k<q} J_k sin(k theta).
std::pair<TrigSeries, TrigSeries> target_series(const TruncationPlan& plan);

}  // namespace qsp
