#pragma once
#include <cstdint>
#include <string>

#include "engine.hpp"
#include "phasefind.hpp"
#include "walk.hpp"

namespace qsp {

// JSON text <-> Hamiltonian.  The document holds
//   {"n": int, "d": int, "entries": [[row, col, re, im], ...],
//    "hermitize": bool (optional, default false)}.
SparseHamiltonian hamiltonian_from_json(const std::string& text);
std::string hamiltonian_to_json(const SparseHamiltonian& h);

// Deterministic d-sparse Hermitian instance: random diagonal reals and
// complex conjugate pairs, entries bounded by 1 in magnitude.
SparseHamiltonian random_hamiltonian(int n, int d, std::uint64_t seed);

std::string simulation_report_json(const SimulationReport& r);
std::string eigenphase_report_json(const EigenphaseReport& r);
// {"phases": [...], "diagnostics": {...}}
std::string synthesis_json(const SynthesisResult& r);

}  // namespace qsp
