/* qspsim: optimal-query simulation of d-sparse Hamiltonians by phased
 * quantum-walk products, exposed as a C API over opaque handles.
 *
 * All functions returning qsp_status leave a human-readable message for the
 * calling thread retrievable via qsp_last_error() on failure.  Strings
 * returned through char** out-parameters are heap-allocated and must be
 * released with qsp_string_free().
 */
#ifndef QSPSIM_H
#define QSPSIM_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum qsp_status {
  QSP_OK = 0,
  QSP_ERR_INVALID_ARGUMENT = 1,
  QSP_ERR_PARSE = 2,
  QSP_ERR_NOT_HERMITIAN = 3,
  QSP_ERR_SPARSITY_EXCEEDED = 4,
  QSP_ERR_ZERO_HAMILTONIAN = 5,
  QSP_ERR_CAP_EXCEEDED = 6,
  QSP_ERR_SYNTHESIS = 7,
  QSP_ERR_BOUND_VIOLATION = 8,
  QSP_ERR_INTERNAL = 9
} qsp_status;

const char* qsp_version(void);
/* Message for the most recent failure on this thread; empty string if none. */
const char* qsp_last_error(void);
void qsp_string_free(char* s);

/* ---- Hamiltonian handles ---- */

typedef struct qsp_hamiltonian qsp_hamiltonian;

/* JSON document {"n": int, "d": int, "entries": [[row, col, re, im], ...],
 * "hermitize": bool (optional)}. */
qsp_status qsp_hamiltonian_from_json(const char* json_text, qsp_hamiltonian** out);
qsp_status qsp_hamiltonian_random(int n_qubits, int sparsity, uint64_t seed,
                                  qsp_hamiltonian** out);
void qsp_hamiltonian_free(qsp_hamiltonian* h);

int qsp_hamiltonian_qubits(const qsp_hamiltonian* h);
int qsp_hamiltonian_sparsity(const qsp_hamiltonian* h);
double qsp_hamiltonian_max_element(const qsp_hamiltonian* h);
/* Entry (row, col) of the operator. */
qsp_status qsp_hamiltonian_entry(const qsp_hamiltonian* h, int row, int col,
                                 double* re, double* im);
/* Column index served by slot l of row j (including padding slots). */
qsp_status qsp_hamiltonian_neighbor(const qsp_hamiltonian* h, int row, int slot,
                                    int* col);
qsp_status qsp_hamiltonian_to_json(const qsp_hamiltonian* h, char** json_out);

/* ---- Planning and special functions ---- */

/* Query budget for target accuracy eps at rescaled time tau: q harmonics,
 * n_queries = 2(q-1) stages, the guaranteed tail bound, and the largest
 * provably insufficient harmonic count. Any output may be NULL. */
qsp_status qsp_truncation_plan(double tau, double eps, int* q, int* n_queries,
                               double* eps_bound, int* q_lower);

/* values[0..k_max] receive J_0(tau)..J_kmax(tau). */
qsp_status qsp_bessel_j(int k_max, double tau, double* values);

/* ---- Phase synthesis ---- */

typedef struct qsp_phase_program qsp_phase_program;

/* Phases realizing e^{-i tau sin theta} to accuracy eps (plus the documented
 * rescaling overhead). */
qsp_status qsp_phases_for_tau(double tau, double eps, qsp_phase_program** out);
void qsp_phase_program_free(qsp_phase_program* p);
int qsp_phase_program_length(const qsp_phase_program* p);
qsp_status qsp_phase_program_values(const qsp_phase_program* p, double* phases);
/* {"phases": [...], "diagnostics": {eps_in, gap_after_rescale, delta,
 * unitarity_residual, gap_final, min_success_prob, N}} */
qsp_status qsp_phase_program_json(const qsp_phase_program* p, char** json_out);

/* ---- End-to-end runs ---- */

/* Simulates e^{-iHt}.  On QSP_OK every certified bound held; if the run
 * completed but a bound failed, returns QSP_ERR_BOUND_VIOLATION with the
 * report still filled in. */
qsp_status qsp_simulate(const qsp_hamiltonian* h, double time, double eps,
                        char** report_json);

/* Builds the walk and checks its spectrum against the arcsine map of the
 * eigenvalues of H. */
qsp_status qsp_walk_check(const qsp_hamiltonian* h, char** report_json);

#ifdef __cplusplus
}
#endif

#endif /* QSPSIM_H */
