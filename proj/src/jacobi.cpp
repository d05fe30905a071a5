#include "jacobi.hpp"

#include <cmath>

#include "errors.hpp"

namespace qsp {

std::vector<double> bessel_j(int k_max, double tau) {
  if (k_max < 0) throw Error(ErrorCode::invalid_argument, "k_max must be >= 0");
  if (!(tau >= 0) || !std::isfinite(tau))
    throw Error(ErrorCode::invalid_argument, "tau must be finite and >= 0");
  std::vector<double> j(k_max + 1, 0.0);
  if (tau == 0) {
    j[0] = 1.0;
    return j;
  }

  // Miller's backward recurrence: run f_{k-1} = (2k/tau) f_k - f_{k+1} down
  // from a start index far enough above k_max that the seed error has decayed
  // below machine precision, then normalize with f_0 + 2 sum_{even} f_k.
  const int k_start = k_max + 30 + static_cast<int>(std::ceil(tau));
  double fkp1 = 0.0, fk = 1e-30, norm = 0.0;
  if (k_start % 2 == 0) norm += 2 * fk;
  for (int k = k_start; k >= 1; --k) {
    double fkm1 = (2.0 * k / tau) * fk - fkp1;
    fkp1 = fk;
    fk = fkm1;
    if (k - 1 <= k_max) j[k - 1] = fk;
    if ((k - 1) % 2 == 0 && k - 1 > 0) norm += 2 * fk;
    if (std::abs(fk) > 1e250) {
      const double s = 1e-250;
      fk *= s;
      fkp1 *= s;
      norm *= s;
      for (double& v : j) v *= s;
    }
  }
  norm += fk;  // the k = 0 term
  for (double& v : j) v /= norm;
  return j;
}

double truncation_bound(double tau, int q) {
  if (q < 1) throw Error(ErrorCode::invalid_argument, "q must be >= 1");
  // 4 (tau/2)^q / q! accumulated as a running product to avoid overflow
  double prod = 1.0;
  for (int i = 1; i <= q; ++i) prod *= (tau / 2) / i;
  return 4 * prod;
}

int lower_bound_q(double tau, double eps) {
  if (!(tau > 0) || !std::isfinite(tau))
    throw Error(ErrorCode::invalid_argument, "tau must be positive");
  if (!(eps > 0) || !(eps < 1))
    throw Error(ErrorCode::invalid_argument, "eps must lie in (0, 1)");
  // Largest q with eps < |sin(tau/q)|^q / 2.  The left side is not monotone
  // below q ~ tau, so scan the full range.
  int best = 0;
  int q_hi = std::max(1000, static_cast<int>(3 * tau) + 10);
  for (int q = 1; q <= q_hi; ++q) {
    double v = 0.5 * std::pow(std::abs(std::sin(tau / q)), q);
    if (eps < v) best = q;
  }
  return best;
}

TruncationPlan choose_truncation(double tau, double eps) {
  if (!(tau > 0) || !std::isfinite(tau))
    throw Error(ErrorCode::invalid_argument, "tau must be positive");
  if (!(eps > 0) || !(eps < 1))
    throw Error(ErrorCode::invalid_argument, "eps must lie in (0, 1)");
  int q = static_cast<int>(std::ceil(tau)) + 1;
  while (truncation_bound(tau, q) > eps) {
    ++q;
    if (q > 5000) throw Error(ErrorCode::internal, "truncation search did not converge");
  }
  TruncationPlan plan;
  plan.tau = tau;
  plan.q = q;
  plan.n_queries = 2 * (q - 1);
  plan.eps_target = eps;
  plan.eps_bound = truncation_bound(tau, q);
  plan.q_lower = lower_bound_q(tau, eps);
  return plan;
}

std::pair<TrigSeries, TrigSeries> target_series(const TruncationPlan& plan) {
  if (plan.q < 2 || !(plan.tau > 0))
    throw Error(ErrorCode::invalid_argument, "invalid truncation plan");
  std::vector<double> bes = bessel_j(plan.q - 1, plan.tau);
  int k = plan.q - 1;
  std::vector<double> a(k + 1, 0.0), c(k, 0.0);
  a[0] = bes[0];
  for (int m = 1; m <= k; ++m) {
    if (m % 2 == 0)
      a[m] = 2 * bes[m];
    else
      c[m - 1] = -2 * bes[m];
  }
  return {TrigSeries(std::move(a)), TrigSeries({0.0}, std::move(c))};
}

}  // namespace qsp
