#include "qspsim.h"

#include <cstring>
#include <string>

#include "engine.hpp"
#include "errors.hpp"
#include "ham_io.hpp"
#include "jacobi.hpp"
#include "phasefind.hpp"

using namespace qsp;

struct qsp_hamiltonian {
  SparseHamiltonian h;
};

struct qsp_phase_program {
  SynthesisResult syn;
};

namespace {

thread_local std::string g_last_error;

qsp_status status_of(ErrorCode c) {
  switch (c) {
    case ErrorCode::invalid_argument: return QSP_ERR_INVALID_ARGUMENT;
    case ErrorCode::parse: return QSP_ERR_PARSE;
    case ErrorCode::not_hermitian: return QSP_ERR_NOT_HERMITIAN;
    case ErrorCode::sparsity_exceeded: return QSP_ERR_SPARSITY_EXCEEDED;
    case ErrorCode::zero_hamiltonian: return QSP_ERR_ZERO_HAMILTONIAN;
    case ErrorCode::cap_exceeded: return QSP_ERR_CAP_EXCEEDED;
    case ErrorCode::synthesis: return QSP_ERR_SYNTHESIS;
    case ErrorCode::bound_violation: return QSP_ERR_BOUND_VIOLATION;
    case ErrorCode::internal: return QSP_ERR_INTERNAL;
  }
  return QSP_ERR_INTERNAL;
}

// Runs fn, translating exceptions into status codes + thread-local message.
template <typename Fn>
qsp_status guarded(Fn&& fn) {
  try {
    g_last_error.clear();
    fn();
    return QSP_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return status_of(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return QSP_ERR_INTERNAL;
  }
}

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

}  // namespace

extern "C" {

const char* qsp_version(void) { return "1.0.0"; }

const char* qsp_last_error(void) { return g_last_error.c_str(); }

void qsp_string_free(char* s) { delete[] s; }

qsp_status qsp_hamiltonian_from_json(const char* json_text, qsp_hamiltonian** out) {
  if (!json_text || !out) {
    g_last_error = "null argument";
    return QSP_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] { *out = new qsp_hamiltonian{hamiltonian_from_json(json_text)}; });
}

qsp_status qsp_hamiltonian_random(int n_qubits, int sparsity, uint64_t seed,
                                  qsp_hamiltonian** out) {
  if (!out) {
    g_last_error = "null argument";
    return QSP_ERR_INVALID_ARGUMENT;
  }
  return guarded(
      [&] { *out = new qsp_hamiltonian{random_hamiltonian(n_qubits, sparsity, seed)}; });
}

void qsp_hamiltonian_free(qsp_hamiltonian* h) { delete h; }

int qsp_hamiltonian_qubits(const qsp_hamiltonian* h) { return h ? h->h.qubits() : 0; }

int qsp_hamiltonian_sparsity(const qsp_hamiltonian* h) { return h ? h->h.sparsity() : 0; }

double qsp_hamiltonian_max_element(const qsp_hamiltonian* h) {
  return h ? h->h.h_max() : 0.0;
}

qsp_status qsp_hamiltonian_entry(const qsp_hamiltonian* h, int row, int col, double* re,
                                 double* im) {
  if (!h || !re || !im) {
    g_last_error = "null argument";
    return QSP_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] {
    cplx v = h->h.entry(row, col);
    *re = v.real();
    *im = v.imag();
  });
}

qsp_status qsp_hamiltonian_neighbor(const qsp_hamiltonian* h, int row, int slot,
                                    int* col) {
  if (!h || !col) {
    g_last_error = "null argument";
    return QSP_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] { *col = h->h.oracle_f(row, slot); });
}

qsp_status qsp_hamiltonian_to_json(const qsp_hamiltonian* h, char** json_out) {
  if (!h || !json_out) {
    g_last_error = "null argument";
    return QSP_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] { *json_out = dup_string(hamiltonian_to_json(h->h)); });
}

qsp_status qsp_truncation_plan(double tau, double eps, int* q, int* n_queries,
                               double* eps_bound, int* q_lower) {
  return guarded([&] {
    TruncationPlan plan = choose_truncation(tau, eps);
    if (q) *q = plan.q;
    if (n_queries) *n_queries = plan.n_queries;
    if (eps_bound) *eps_bound = plan.eps_bound;
    if (q_lower) *q_lower = plan.q_lower;
  });
}

qsp_status qsp_bessel_j(int k_max, double tau, double* values) {
  if (!values) {
    g_last_error = "null argument";
    return QSP_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] {
    std::vector<double> v = bessel_j(k_max, tau);
    std::memcpy(values, v.data(), v.size() * sizeof(double));
  });
}

qsp_status qsp_phases_for_tau(double tau, double eps, qsp_phase_program** out) {
  if (!out) {
    g_last_error = "null argument";
    return QSP_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] {
    TruncationPlan plan = choose_truncation(tau, eps);
    if (plan.n_queries > 64)
      throw Error(ErrorCode::cap_exceeded,
                  "N cap exceeded: plan needs N = " + std::to_string(plan.n_queries));
    auto [a, c] = target_series(plan);
    auto target = [tau](double th) { return -tau * std::sin(th); };
    *out = new qsp_phase_program{synthesize(a, c, plan.eps_bound, target)};
  });
}

void qsp_phase_program_free(qsp_phase_program* p) { delete p; }

int qsp_phase_program_length(const qsp_phase_program* p) {
  return p ? p->syn.phases.length() : 0;
}

qsp_status qsp_phase_program_values(const qsp_phase_program* p, double* phases) {
  if (!p || !phases) {
    g_last_error = "null argument";
    return QSP_ERR_INVALID_ARGUMENT;
  }
  const auto& v = p->syn.phases.phases();
  std::memcpy(phases, v.data(), v.size() * sizeof(double));
  return QSP_OK;
}

qsp_status qsp_phase_program_json(const qsp_phase_program* p, char** json_out) {
  if (!p || !json_out) {
    g_last_error = "null argument";
    return QSP_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] { *json_out = dup_string(synthesis_json(p->syn)); });
}

qsp_status qsp_simulate(const qsp_hamiltonian* h, double time, double eps,
                        char** report_json) {
  if (!h || !report_json) {
    g_last_error = "null argument";
    return QSP_ERR_INVALID_ARGUMENT;
  }
  bool bounds_ok = false;
  qsp_status st = guarded([&] {
    SimulationReport rep = simulate(h->h, time, eps);
    bounds_ok = rep.bounds_ok;
    *report_json = dup_string(simulation_report_json(rep));
  });
  if (st != QSP_OK) return st;
  if (!bounds_ok) {
    g_last_error = "certified bounds violated; see report";
    return QSP_ERR_BOUND_VIOLATION;
  }
  return QSP_OK;
}

qsp_status qsp_walk_check(const qsp_hamiltonian* h, char** report_json) {
  if (!h || !report_json) {
    g_last_error = "null argument";
    return QSP_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] {
    WalkOperator w = build_walk(h->h);
    EigenphaseReport rep = eigenphase_check(h->h, w);
    *report_json = dup_string(eigenphase_report_json(rep));
  });
}

}  // extern "C"
