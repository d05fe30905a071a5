// Exercises the installed command-line binary end to end.  The binary path
// arrives via QSPSIM_CLI and the fixture directory via QSPSIM_TEST_DATA.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

using nlohmann::json;

namespace {

struct RunResult {
  int code = -1;
  std::string out, err;
};

std::string read_file(const std::string& path) {
  std::ifstream f(path);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

std::string temp_path(const std::string& leaf) {
  const char* base = std::getenv("TMPDIR");
  return std::string(base ? base : "/tmp") + "/" + leaf;
}

RunResult run_cli(const std::string& args) {
  const char* bin = std::getenv("QSPSIM_CLI");
  REQUIRE(bin != nullptr);
  std::string out_file = temp_path("qspsim_cli_out.txt");
  std::string err_file = temp_path("qspsim_cli_err.txt");
  std::string cmd = std::string(bin) + " " + args + " > " + out_file + " 2> " + err_file;
  int raw = std::system(cmd.c_str());
  RunResult r;
  r.code = WEXITSTATUS(raw);
  r.out = read_file(out_file);
  r.err = read_file(err_file);
  return r;
}

std::string data_file(const std::string& leaf) {
  const char* dir = std::getenv("QSPSIM_TEST_DATA");
  REQUIRE(dir != nullptr);
  return std::string(dir) + "/" + leaf;
}

// Drops the wall-clock column so reruns can be compared bitwise.
std::string strip_wall_time(const std::string& csv) {
  std::istringstream in(csv);
  std::ostringstream out;
  std::string line;
  while (std::getline(in, line)) {
    std::size_t cut = line.rfind(',');
    out << line.substr(0, cut) << '\n';
  }
  return out.str();
}

}  // namespace

TEST_CASE("bessel subcommand prints a value table") {
  RunResult r = run_cli("bessel --tau 1 --kmax 4");
  CHECK(r.code == 0);
  json doc = json::parse(r.out);
  REQUIRE(doc["values"].size() == 5);
  CHECK(doc["values"][0].get<double>() == doctest::Approx(0.7651976865579666).epsilon(1e-12));
  CHECK(doc["values"][1].get<double>() == doctest::Approx(0.4400505857449335).epsilon(1e-12));
}

TEST_CASE("phases subcommand emits the documented program shape") {
  RunResult r = run_cli("phases --tau 1 --eps 1e-3");
  CHECK(r.code == 0);
  json doc = json::parse(r.out);
  CHECK(doc["phases"].size() == 10);
  CHECK(doc["diagnostics"]["N"] == 10);
  CHECK(doc["diagnostics"]["gap_final"].get<double>() <= 8e-3);
}

TEST_CASE("simulate subcommand certifies the bounds on the fixture") {
  RunResult r = run_cli("simulate --hamiltonian " + data_file("ham_2q.json") +
                        " --time 0.45 --eps 1e-3");
  CHECK(r.code == 0);
  json doc = json::parse(r.out);
  CHECK(doc["bounds_ok"] == true);
  CHECK(doc["trace_distance"].get<double>() <= 8e-3);
  CHECK(doc["success_prob_min"].get<double>() >= 1 - 16e-3);
}

TEST_CASE("walk-check subcommand reports the spectral map") {
  RunResult r = run_cli("walk-check --hamiltonian " + data_file("ham_2q.json"));
  CHECK(r.code == 0);
  json doc = json::parse(r.out);
  CHECK(doc["max_deviation"].get<double>() < 1e-10);
  CHECK(doc["rows"].size() == 4);
}

TEST_CASE("sweep subcommand writes a deterministic CSV") {
  std::string out1 = temp_path("sweep1.csv");
  std::string out2 = temp_path("sweep2.csv");
  std::string args = "sweep --tau-list 1,2 --eps-list 1e-2,1e-3 --trials 2 --seed 77 --jobs 2";
  RunResult r1 = run_cli(args + " --out " + out1);
  CHECK(r1.code == 0);
  std::string csv = read_file(out1);
  std::istringstream in(csv);
  std::string header;
  std::getline(in, header);
  CHECK(header ==
        "tau,eps_target,q,N,q_lower,gap_fourier,trace_distance,success_prob_min,wall_time_s");
  int rows = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ++rows;
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    REQUIRE(cells.size() == 9);
    double eps = std::stod(cells[1]);
    double trace = std::stod(cells[6]);
    double success = std::stod(cells[7]);
    CHECK(trace <= 8 * eps);
    CHECK(success >= 1 - 16 * eps);
  }
  CHECK(rows == 8);
  RunResult r2 = run_cli(args + " --out " + out2);
  CHECK(r2.code == 0);
  CHECK(strip_wall_time(read_file(out1)) == strip_wall_time(read_file(out2)));
}

TEST_CASE("config file supplies defaults and flags override it") {
  std::string cfg = temp_path("qspsim_cfg.json");
  {
    std::ofstream f(cfg);
    f << R"({"tau": 1.0, "eps": 1e-3})";
  }
  RunResult base = run_cli("phases --config " + cfg);
  CHECK(base.code == 0);
  CHECK(json::parse(base.out)["phases"].size() == 10);
  RunResult over = run_cli("phases --config " + cfg + " --eps 1e-6");
  CHECK(over.code == 0);
  CHECK(json::parse(over.out)["phases"].size() == 14);
}

TEST_CASE("failures map to documented nonzero exit codes") {
  RunResult missing = run_cli("simulate --hamiltonian /nonexistent.json --time 1 --eps 1e-3");
  CHECK(missing.code == 1);
  CHECK(missing.err.find("cannot read") != std::string::npos);

  std::string broken = temp_path("broken_ham.json");
  {
    std::ofstream f(broken);
    f << "{not json";
  }
  RunResult parse = run_cli("simulate --hamiltonian " + broken + " --time 1 --eps 1e-3");
  CHECK(parse.code == 2);
  CHECK(parse.err.find("parse error") != std::string::npos);

  std::string lopsided = temp_path("lopsided_ham.json");
  {
    std::ofstream f(lopsided);
    f << R"({"n":1,"d":2,"entries":[[0,1,1.0,0.0]]})";
  }
  RunResult herm = run_cli("walk-check --hamiltonian " + lopsided);
  CHECK(herm.code == 3);
  CHECK(herm.err.find("not Hermitian") != std::string::npos);

  RunResult noarg = run_cli("phases --eps 1e-3");
  CHECK(noarg.code == 1);
  RunResult badsub = run_cli("frobnicate");
  CHECK(badsub.code != 0);
}

TEST_CASE("version flag prints a semver string") {
  RunResult r = run_cli("--version");
  CHECK(r.code == 0);
  CHECK(std::count(r.out.begin(), r.out.end(), '.') >= 2);
}
