#include "ham_io.hpp"

#include <json.hpp>
#include <random>

#include "errors.hpp"

namespace qsp {

using nlohmann::json;

SparseHamiltonian hamiltonian_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::parse, std::string("parse error: ") + e.what());
  }
  try {
    if (!doc.is_object() || !doc.contains("n") || !doc.contains("d") ||
        !doc.contains("entries"))
      throw Error(ErrorCode::parse, "parse error: need keys n, d, entries");
    int n = doc.at("n").get<int>();
    int d = doc.at("d").get<int>();
    bool hermitize = doc.value("hermitize", false);
    std::vector<HamEntry> entries;
    for (const auto& row : doc.at("entries")) {
      if (!row.is_array() || row.size() != 4)
        throw Error(ErrorCode::parse, "parse error: entry must be [row, col, re, im]");
      entries.push_back({row[0].get<int>(), row[1].get<int>(),
                         cplx(row[2].get<double>(), row[3].get<double>())});
    }
    return SparseHamiltonian::from_entries(n, d, entries, hermitize);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::parse, std::string("parse error: ") + e.what());
  }
}

std::string hamiltonian_to_json(const SparseHamiltonian& h) {
  json entries = json::array();
  for (const HamEntry& e : h.entries())
    entries.push_back({e.row, e.col, e.value.real(), e.value.imag()});
  json doc{{"n", h.qubits()}, {"d", h.sparsity()}, {"entries", entries}};
  return doc.dump();
}

SparseHamiltonian random_hamiltonian(int n, int d, std::uint64_t seed) {
  if (n < 1 || n > 10) throw Error(ErrorCode::invalid_argument, "n must lie in 1..10");
  const int dim = 1 << n;
  if (d < 1 || d > dim) throw Error(ErrorCode::invalid_argument, "d must lie in 1..2^n");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_int_distribution<int> site(0, dim - 1);
  std::vector<int> load(dim, 0);
  std::vector<HamEntry> entries;
  auto occupied = [&](int j, int k) {
    for (const HamEntry& e : entries)
      if (e.row == j && e.col == k) return true;
    return false;
  };

  // Diagonals first (one slot each), then conjugate off-diagonal pairs until
  // the rows fill up or the attempt budget runs out.
  for (int j = 0; j < dim; ++j)
    if (load[j] < d && unit(rng) > 0) {
      entries.push_back({j, j, cplx(unit(rng), 0)});
      ++load[j];
    }
  for (int attempt = 0; attempt < 8 * dim * d; ++attempt) {
    int j = site(rng), k = site(rng);
    if (j == k || load[j] >= d || load[k] >= d || occupied(j, k)) continue;
    cplx v(unit(rng), unit(rng));
    v /= std::max(1.0, std::abs(v));
    entries.push_back({j, k, v});
    entries.push_back({k, j, std::conj(v)});
    ++load[j];
    ++load[k];
  }
  if (entries.empty()) entries.push_back({0, 0, cplx(1.0, 0)});
  return SparseHamiltonian::from_entries(n, d, entries, /*hermitize=*/false);
}

std::string simulation_report_json(const SimulationReport& r) {
  json doc{{"tau", r.tau},
           {"eps_target", r.eps_target},
           {"q", r.q},
           {"N", r.n_queries},
           {"q_lower", r.q_lower},
           {"gap_fourier", r.gap_fourier},
           {"trace_distance", r.trace_distance},
           {"success_prob_min", r.success_prob_min},
           {"wall_time_s", r.wall_time_s},
           {"t_residual", r.t_residual},
           {"w_residual", r.w_residual},
           {"u_phi_residual_max", r.u_phi_residual_max},
           {"v_block_residual", r.v_block_residual},
           {"reconstruction_residual", r.reconstruction_residual},
           {"bounds_ok", r.bounds_ok},
           {"phases", r.phases}};
  return doc.dump();
}

std::string eigenphase_report_json(const EigenphaseReport& r) {
  json rows = json::array();
  for (const EigenphaseRow& row : r.rows)
    rows.push_back({{"lambda", row.lambda},
                    {"theta_plus", row.theta_plus},
                    {"theta_minus", row.theta_minus},
                    {"dev_plus", row.dev_plus},
                    {"dev_minus", row.dev_minus}});
  json doc{{"max_deviation", r.max_deviation},
           {"reconstruction_residual", r.reconstruction_residual},
           {"rows", rows}};
  return doc.dump();
}

std::string synthesis_json(const SynthesisResult& r) {
  json doc{{"phases", r.phases.phases()},
           {"diagnostics",
            {{"eps_in", r.diag.eps_in},
             {"gap_after_rescale", r.diag.gap_after_rescale},
             {"delta", r.diag.delta},
             {"unitarity_residual", r.diag.unitarity_residual},
             {"gap_final", r.diag.gap_final},
             {"min_success_prob", r.diag.min_success_prob},
             {"N", r.diag.n}}}};
  return doc.dump();
}

}  // namespace qsp
