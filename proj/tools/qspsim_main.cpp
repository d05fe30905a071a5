// Command-line front end over the shared-library C API: subcommands for phase
// synthesis, end-to-end simulation, parameter sweeps, walk spectrum checks and
// Bessel tables.  Flags may also be supplied through a JSON --config file;
// explicit flags win over file values.  The process exit code is the C API
// status of the run, so 0 means every certified bound held.
#include <CLI11.hpp>
#include <atomic>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <qspsim.h>

using nlohmann::json;

namespace {

int fail(qsp_status st, const std::string& what) {
  std::cerr << what << ": " << qsp_last_error() << "\n";
  return static_cast<int>(st);
}

int fail_local(qsp_status st, const std::string& msg) {
  std::cerr << msg << "\n";
  return static_cast<int>(st);
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Emits to the --out target, standard output when the path is "-" or empty.
int emit(const std::string& out_path, const std::string& text) {
  if (out_path.empty() || out_path == "-") {
    std::cout << text;
    if (text.empty() || text.back() != '\n') std::cout << "\n";
    return 0;
  }
  std::ofstream f(out_path);
  if (!f) return fail_local(QSP_ERR_INVALID_ARGUMENT, "cannot open output file " + out_path);
  f << text;
  if (text.empty() || text.back() != '\n') f << "\n";
  return 0;
}

std::optional<std::string> slurp(const std::string& path) {
  std::ifstream f(path);
  if (!f) return std::nullopt;
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

// Values from a JSON config document fill in flags the user did not pass.
class ConfigLayer {
public:
  int load(const std::string& path) {
    if (path.empty()) return 0;
    std::optional<std::string> text = slurp(path);
    if (!text) return fail_local(QSP_ERR_INVALID_ARGUMENT, "cannot read config file " + path);
    try {
      doc_ = json::parse(*text);
    } catch (const json::exception& e) {
      return fail_local(QSP_ERR_PARSE, std::string("parse error in config file: ") + e.what());
    }
    if (!doc_.is_object()) return fail_local(QSP_ERR_PARSE, "config file must hold a JSON object");
    return 0;
  }

  template <typename T>
  void merge(const CLI::Option* opt, const char* key, T& value) const {
    if (opt->count() > 0 || !doc_.contains(key)) return;
    try {
      value = doc_.at(key).get<T>();
    } catch (const json::exception&) {
      bad_ = std::string("config field '") + key + "' has the wrong type";
    }
  }

  int check() const {
    if (bad_.empty()) return 0;
    return fail_local(QSP_ERR_PARSE, "parse error: " + bad_);
  }

private:
  json doc_ = json::object();
  mutable std::string bad_;
};

struct HamHandle {
  qsp_hamiltonian* h = nullptr;
  ~HamHandle() {
    if (h) qsp_hamiltonian_free(h);
  }
};

int load_hamiltonian(const std::string& path, HamHandle& out) {
  if (path.empty())
    return fail_local(QSP_ERR_INVALID_ARGUMENT, "missing required --hamiltonian file");
  std::optional<std::string> text = slurp(path);
  if (!text) return fail_local(QSP_ERR_INVALID_ARGUMENT, "cannot read file " + path);
  qsp_status st = qsp_hamiltonian_from_json(text->c_str(), &out.h);
  if (st != QSP_OK) return fail(st, path);
  return 0;
}

int default_jobs() {
  if (const char* env = std::getenv("QSPSIM_JOBS")) {
    int v = std::atoi(env);
    if (v >= 1) return v;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 2 : static_cast<int>(hw);
}

// ---- subcommand runners ----

int run_phases(double tau, double eps, const std::string& out_path) {
  qsp_phase_program* prog = nullptr;
  qsp_status st = qsp_phases_for_tau(tau, eps, &prog);
  if (st != QSP_OK) return fail(st, "phases");
  char* text = nullptr;
  st = qsp_phase_program_json(prog, &text);
  qsp_phase_program_free(prog);
  if (st != QSP_OK) return fail(st, "phases");
  std::string doc(text);
  qsp_string_free(text);
  int rc = emit(out_path, doc);
  if (rc != 0) return rc;
  double gap = json::parse(doc)["diagnostics"]["gap_final"].get<double>();
  if (gap > 8 * eps) return fail_local(QSP_ERR_BOUND_VIOLATION, "phase response gap exceeds 8*eps");
  return 0;
}

int run_simulate(const std::string& ham_path, double time, double eps,
                 const std::string& out_path) {
  HamHandle ham;
  if (int rc = load_hamiltonian(ham_path, ham)) return rc;
  char* text = nullptr;
  qsp_status st = qsp_simulate(ham.h, time, eps, &text);
  if (st != QSP_OK && text == nullptr) return fail(st, "simulate");
  std::string doc(text);
  qsp_string_free(text);
  if (int rc = emit(out_path, doc)) return rc;
  if (st != QSP_OK) return fail(st, "simulate");
  return 0;
}

int run_walk_check(const std::string& ham_path, const std::string& out_path) {
  HamHandle ham;
  if (int rc = load_hamiltonian(ham_path, ham)) return rc;
  char* text = nullptr;
  qsp_status st = qsp_walk_check(ham.h, &text);
  if (st != QSP_OK) return fail(st, "walk-check");
  std::string doc(text);
  qsp_string_free(text);
  if (int rc = emit(out_path, doc)) return rc;
  if (json::parse(doc)["max_deviation"].get<double>() > 1e-10)
    return fail_local(QSP_ERR_BOUND_VIOLATION, "eigenphase deviation exceeds 1e-10");
  return 0;
}

int run_bessel(double tau, int kmax, const std::string& out_path) {
  std::vector<double> values(static_cast<std::size_t>(kmax) + 1);
  qsp_status st = qsp_bessel_j(kmax, tau, values.data());
  if (st != QSP_OK) return fail(st, "bessel");
  json doc{{"tau", tau}, {"kmax", kmax}, {"values", values}};
  return emit(out_path, doc.dump(2));
}

struct SweepPoint {
  double tau, eps;
  int trial;
  std::uint64_t seed;
};

int run_sweep(std::vector<double> taus, std::vector<double> epss, int trials, std::uint64_t seed,
              int qubits, int sparsity, int jobs, const std::string& out_path) {
  if (taus.empty() || epss.empty() || trials < 1)
    return fail_local(QSP_ERR_INVALID_ARGUMENT, "sweep needs nonempty --tau-list/--eps-list and --trials >= 1");
  std::vector<SweepPoint> points;
  for (std::size_t i = 0; i < taus.size(); ++i)
    for (std::size_t j = 0; j < epss.size(); ++j)
      for (int k = 0; k < trials; ++k)
        points.push_back({taus[i], epss[j], k,
                          mix64(seed ^ (0x51ULL * i + 0xE7ULL * j + 0x9DULL * k + 1))});
  std::vector<std::string> rows(points.size());
  std::vector<int> codes(points.size(), 0);
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= points.size()) return;
      const SweepPoint& pt = points[i];
      qsp_hamiltonian* h = nullptr;
      qsp_status st = qsp_hamiltonian_random(qubits, sparsity, pt.seed, &h);
      if (st != QSP_OK) {
        codes[i] = static_cast<int>(st);
        continue;
      }
      double x = qsp_hamiltonian_sparsity(h) * qsp_hamiltonian_max_element(h);
      char* text = nullptr;
      st = qsp_simulate(h, pt.tau / x, pt.eps, &text);
      qsp_hamiltonian_free(h);
      if (text == nullptr) {
        codes[i] = static_cast<int>(st);
        continue;
      }
      json rep = json::parse(text);
      qsp_string_free(text);
      std::ostringstream os;
      os << fmt(pt.tau) << ',' << fmt(pt.eps) << ',' << rep["q"].get<int>() << ','
         << rep["N"].get<int>() << ',' << rep["q_lower"].get<int>() << ','
         << fmt(rep["gap_fourier"].get<double>()) << ','
         << fmt(rep["trace_distance"].get<double>()) << ','
         << fmt(rep["success_prob_min"].get<double>()) << ','
         << fmt(rep["wall_time_s"].get<double>());
      rows[i] = os.str();
      codes[i] = static_cast<int>(st);
    }
  };

  int n_workers = std::max(1, std::min<int>(jobs, static_cast<int>(points.size())));
  std::vector<std::thread> pool;
  for (int i = 0; i < n_workers; ++i) pool.emplace_back(worker);
  for (std::thread& th : pool) th.join();

  std::ostringstream csv;
  csv << "tau,eps_target,q,N,q_lower,gap_fourier,trace_distance,success_prob_min,wall_time_s\n";
  int worst = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!rows[i].empty()) csv << rows[i] << '\n';
    worst = std::max(worst, codes[i]);
  }
  if (int rc = emit(out_path, csv.str())) return rc;
  if (worst != 0) return fail_local(static_cast<qsp_status>(worst), "sweep: at least one grid point failed its bounds");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hamiltonian simulation by phased quantum-walk products"};
  app.set_version_flag("--version", []() { return std::string(qsp_version()); });
  app.require_subcommand(1);

  std::string config_path, out_path = "-", ham_path;
  double tau = 0, eps = 0, time = 0;
  int kmax = 20, trials = 5, qubits = 2, sparsity = 2, jobs = default_jobs();
  std::uint64_t seed = 1234;
  std::vector<double> tau_list{1.0, 2.0, 5.0};
  std::vector<double> eps_list{1e-2, 1e-4, 1e-6};

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON file supplying defaults for these flags");
    cmd->add_option("--out", out_path, "output file path, '-' for stdout");
  };

  CLI::App* c_phases = app.add_subcommand("phases", "synthesize a phase program for exp(-i tau sin(theta))");
  auto* p_tau = c_phases->add_option("--tau", tau, "rescaled evolution time");
  auto* p_eps = c_phases->add_option("--eps", eps, "target accuracy");
  add_common(c_phases);

  CLI::App* c_sim = app.add_subcommand("simulate", "simulate exp(-iHt) and certify the error bounds");
  auto* s_ham = c_sim->add_option("--hamiltonian", ham_path, "Hamiltonian JSON file");
  auto* s_time = c_sim->add_option("--time", time, "evolution time t");
  auto* s_eps = c_sim->add_option("--eps", eps, "target accuracy");
  add_common(c_sim);

  CLI::App* c_sweep = app.add_subcommand("sweep", "grid of random-instance simulations, CSV output");
  auto* w_tau = c_sweep->add_option("--tau-list", tau_list, "rescaled times")->delimiter(',');
  auto* w_eps = c_sweep->add_option("--eps-list", eps_list, "target accuracies")->delimiter(',');
  auto* w_trials = c_sweep->add_option("--trials", trials, "instances per grid point");
  auto* w_seed = c_sweep->add_option("--seed", seed, "base seed for instance generation");
  auto* w_qubits = c_sweep->add_option("--qubits", qubits, "qubits per instance");
  auto* w_spars = c_sweep->add_option("--sparsity", sparsity, "nonzeros per row");
  auto* w_jobs = c_sweep->add_option("--jobs", jobs, "concurrent grid points");
  add_common(c_sweep);

  CLI::App* c_walk = app.add_subcommand("walk-check", "verify the walk spectrum against the arcsine map");
  auto* k_ham = c_walk->add_option("--hamiltonian", ham_path, "Hamiltonian JSON file");
  add_common(c_walk);

  CLI::App* c_bessel = app.add_subcommand("bessel", "table of Bessel J_k values");
  auto* b_tau = c_bessel->add_option("--tau", tau, "argument");
  auto* b_kmax = c_bessel->add_option("--kmax", kmax, "largest order");
  add_common(c_bessel);

  CLI11_PARSE(app, argc, argv);

  ConfigLayer cfg;
  if (int rc = cfg.load(config_path)) return rc;

  if (c_phases->parsed()) {
    cfg.merge(p_tau, "tau", tau);
    cfg.merge(p_eps, "eps", eps);
    if (int rc = cfg.check()) return rc;
    if (p_tau->count() == 0 && tau == 0)
      return fail_local(QSP_ERR_INVALID_ARGUMENT, "missing required --tau");
    if (p_eps->count() == 0 && eps == 0)
      return fail_local(QSP_ERR_INVALID_ARGUMENT, "missing required --eps");
    return run_phases(tau, eps, out_path);
  }
  if (c_sim->parsed()) {
    cfg.merge(s_ham, "hamiltonian", ham_path);
    cfg.merge(s_time, "time", time);
    cfg.merge(s_eps, "eps", eps);
    if (int rc = cfg.check()) return rc;
    return run_simulate(ham_path, time, eps, out_path);
  }
  if (c_sweep->parsed()) {
    cfg.merge(w_tau, "tau_list", tau_list);
    cfg.merge(w_eps, "eps_list", eps_list);
    cfg.merge(w_trials, "trials", trials);
    cfg.merge(w_seed, "seed", seed);
    cfg.merge(w_qubits, "qubits", qubits);
    cfg.merge(w_spars, "sparsity", sparsity);
    cfg.merge(w_jobs, "jobs", jobs);
    if (int rc = cfg.check()) return rc;
    return run_sweep(tau_list, eps_list, trials, seed, qubits, sparsity, jobs, out_path);
  }
  if (c_walk->parsed()) {
    cfg.merge(k_ham, "hamiltonian", ham_path);
    if (int rc = cfg.check()) return rc;
    return run_walk_check(ham_path, out_path);
  }
  if (c_bessel->parsed()) {
    cfg.merge(b_tau, "tau", tau);
    cfg.merge(b_kmax, "kmax", kmax);
    if (int rc = cfg.check()) return rc;
    return run_bessel(tau, kmax, out_path);
  }
  return 0;
}
