#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cstdio>
#include <sstream>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "accqp/bench/corpus.hpp"
#include "accqp/qp/solver.hpp"
#include "accqp/qps/convert.hpp"
#include "accqp/qps/parse.hpp"

namespace fs = std::filesystem;
using namespace accqp;

namespace {

struct CliResult {
  int exit_code;
  std::string output;
};

CliResult run_cli(const std::string& args) {
  const std::string cmd = std::string(ACCQP_CLI_PATH) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  std::array<char, 4096> buf{};
  while (fgets(buf.data(), buf.size(), pipe)) out += buf.data();
  const int status = pclose(pipe);
  return {WEXITSTATUS(status), out};
}

fs::path temp_dir(const std::string& tag) {
  fs::path dir = fs::temp_directory_path() / ("accqp_test_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

const char* kTinyQps =
    "NAME          TINY\n"
    "ROWS\n"
    " N  OBJ\n"
    " E  R1\n"
    "COLUMNS\n"
    "    X1  OBJ  0.0  R1  1.0\n"
    "    X2  OBJ  0.0  R1  1.0\n"
    "RHS\n"
    "    RHS  R1  1.0\n"
    "BOUNDS\n"
    " FR BND  X1\n"
    " FR BND  X2\n"
    "QUADOBJ\n"
    "    X1  X1  1.0\n"
    "    X2  X2  1.0\n"
    "ENDATA\n";

} // namespace

TEST_CASE("solve succeeds on the HS118 stand-in", "[cli]") {
  fs::path dir = temp_dir("solve");
  bench::write_corpus(dir.string(), "HS118");
  CliResult r = run_cli("solve " + (dir / "HS118.qps").string() + " --algo acc --alpha 2");
  INFO(r.output);
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("status     Solved") != std::string::npos);
}

TEST_CASE("solve reports parse errors on exit code 2", "[cli]") {
  fs::path dir = temp_dir("bad");
  std::ofstream(dir / "bad.qps") << "NAME X\nROWZZZ\nENDATA\n";
  CliResult r = run_cli("solve " + (dir / "bad.qps").string());
  INFO(r.output);
  CHECK(r.exit_code == 2);
  CHECK(r.output.find("line 2") != std::string::npos);

  CliResult missing = run_cli("solve /nonexistent/file.qps");
  CHECK(missing.exit_code == 2);
}

TEST_CASE("solve is a thin wrapper over the library run", "[cli]") {
  fs::path dir = temp_dir("thin");
  std::ofstream(dir / "tiny.qps") << kTinyQps;
  CliResult r = run_cli("solve " + (dir / "tiny.qps").string() + " --algo padmm --rho 1.9");
  INFO(r.output);
  CHECK(r.exit_code == 0);

  auto [prob, rep] = qps::to_standard_form(qps::parse_qps_path((dir / "tiny.qps").string()));
  qp::SolverConfig cfg;
  cfg.algorithm = qp::Algorithm::Padmm;
  cfg.rho = 1.9;
  qp::SolveResult lib = qp::run_solver(prob, cfg);

  char expect_obj[64], expect_iter[64];
  std::snprintf(expect_obj, sizeof expect_obj, "objective  %.12e", lib.objective);
  std::snprintf(expect_iter, sizeof expect_iter, "iterations %ld", lib.iterations);
  CHECK(r.output.find(expect_obj) != std::string::npos);
  CHECK(r.output.find(expect_iter) != std::string::npos);

  // identical flags and file give identical output
  CliResult again = run_cli("solve " + (dir / "tiny.qps").string() + " --algo padmm --rho 1.9");
  CHECK(again.output == r.output);
}

TEST_CASE("solve writes the normalized problem dump on request", "[cli]") {
  fs::path dir = temp_dir("dump");
  std::ofstream(dir / "tiny.qps") << kTinyQps;
  fs::path dump = dir / "tiny.dump";
  CliResult r = run_cli("solve " + (dir / "tiny.qps").string() + " --dump " + dump.string());
  CHECK(r.exit_code == 0);
  std::ifstream in(dump);
  std::string first;
  std::getline(in, first);
  CHECK(first == "name TINY");
}

TEST_CASE("solve writes the iteration record CSV", "[cli]") {
  fs::path dir = temp_dir("log");
  std::ofstream(dir / "tiny.qps") << kTinyQps;
  fs::path log = dir / "log.csv";
  CliResult r = run_cli("solve " + (dir / "tiny.qps").string() + " --log " + log.string());
  CHECK(r.exit_code == 0);
  std::ifstream in(log);
  std::string header;
  std::getline(in, header);
  CHECK(header == "k,kkt_res,r_p,r_d,r_qxy,r_comp,sigma,obj,seminorm_res,time_s");
  std::string row;
  CHECK(std::getline(in, row).good());
}

TEST_CASE("bench on an empty directory writes a header-only table", "[cli]") {
  fs::path dir = temp_dir("bench_empty");
  fs::create_directories(dir / "problems");
  fs::path out = dir / "bench.csv";
  CliResult r = run_cli("bench " + (dir / "problems").string() + " --out " + out.string());
  INFO(r.output);
  CHECK(r.exit_code == 0);
  std::ifstream in(out);
  std::string line;
  REQUIRE(std::getline(in, line).good());
  CHECK(line.rfind("problem,m,n,iter_a", 0) == 0);
  // summary rows only after that
  int data_rows = 0;
  while (std::getline(in, line))
    if (line.rfind("__", 0) != 0) ++data_rows;
  CHECK(data_rows == 0);
}

TEST_CASE("bench on a single problem emits one row and the five configs", "[cli]") {
  fs::path dir = temp_dir("bench_one");
  fs::create_directories(dir / "problems");
  std::ofstream(dir / "problems/tiny.qps") << kTinyQps;
  fs::path out = dir / "bench.csv";
  CliResult r = run_cli("bench " + (dir / "problems").string() + " --out " + out.string());
  INFO(r.output);
  CHECK(r.exit_code == 0);

  std::ifstream in(out);
  std::string header, row;
  std::getline(in, header);
  REQUIRE(std::getline(in, row).good());
  CHECK(row.rfind("tiny,1,2,", 0) == 0);
  // reported iterations are a multiple of the check period
  std::istringstream fields(row);
  std::string cell;
  for (int i = 0; i < 4; ++i) std::getline(fields, cell, ',');
  CHECK(std::stol(cell) % 50 == 0);
  // header names the five configurations
  for (const char* c : {"iter_a", "iter_b2", "iter_b15", "iter_b30", "iter_b45"})
    CHECK(header.find(c) != std::string::npos);
  CHECK(r.output.find("reduction") != std::string::npos);
}

TEST_CASE("rate writes the per-iteration decay log", "[cli]") {
  fs::path dir = temp_dir("rate");
  std::ofstream(dir / "tiny.qps") << kTinyQps;
  fs::path out = dir / "rate.csv";
  CliResult r = run_cli("rate " + (dir / "tiny.qps").string() + " --alpha 2 --max-iter 200 --out " +
                        out.string());
  INFO(r.output);
  std::ifstream in(out);
  std::string header;
  std::getline(in, header);
  CHECK(header == "k,seminorm_res,kkt_res,abs_h");
  int rows = 0;
  std::string line, last;
  while (std::getline(in, line)) {
    ++rows;
    last = line;
  }
  // this instance hits KKT_res = 0 at the first check, so exactly 50 rows
  CHECK(rows == 50);
  CHECK(last.rfind("50,", 0) == 0);
}

TEST_CASE("corpus subcommand writes problem files", "[cli]") {
  fs::path dir = temp_dir("corpus");
  CliResult r = run_cli("corpus --out " + dir.string() + " --only QSCORPIO");
  CHECK(r.exit_code == 0);
  CHECK(fs::exists(dir / "QSCORPIO.qps"));
  auto [prob, rep] = qps::to_standard_form(qps::parse_qps_path((dir / "QSCORPIO.qps").string()));
  CHECK(prob.m() == 161);
  CHECK(prob.n() == 226);
}
