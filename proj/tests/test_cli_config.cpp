#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "jmgt/config.hpp"
#include "jmgt/io.hpp"

using namespace jmgt;

namespace {

int run_cli(const std::string& args) {
  std::string cmd = std::string(JMGTLAB_BIN) + " " + args + " > /dev/null 2>&1";
  int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("config defaults, parsing, and overrides") {
  ExperimentConfig cfg = ExperimentConfig::from_json_text("{}");
  CHECK(cfg.medium.tau == 1.0);
  CHECK(cfg.kernel.m == 0.5);
  CHECK(cfg.grid.N == 256);

  cfg = ExperimentConfig::from_json_text(R"({"medium": {"b": 1.5}, "solver": {"dt": 0.02}})");
  CHECK(cfg.medium.b == 1.5);
  CHECK(cfg.solver.dt == 0.02);

  cfg.apply_override("/solver/t_end=7.0");
  CHECK(cfg.solver.t_end == 7.0);
  cfg.apply_override("/kernel/m=0.25");
  CHECK(cfg.kernel.m == 0.25);
  CHECK_THROWS_AS(cfg.apply_override("no_slash=3"), ConfigError);
}

TEST_CASE("cross-field validation") {
  ExperimentConfig cfg = ExperimentConfig::from_json_text(
      R"({"medium": {"k": 1.0}, "solver": {"scheme": "exact_linear"}})");
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = ExperimentConfig::from_json_text(
      R"({"medium": {"k": 1.0}, "solver": {"scheme": "etd2"}})");
  CHECK_NOTHROW(cfg.validate());
  CHECK_THROWS_AS(ExperimentConfig::from_json_text(R"({"kernel": {"kind": "csv"}})"),
                  ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::from_json_text("{bad json"), ConfigError);
}

TEST_CASE("snapshot round trip") {
  auto sp = std::make_shared<Spectral>(Grid::make(1, 32, 6.0));
  MediumParams p{1.0, 1.0, 1.0, 0.0, 1.0};
  MemoryKernel k = MemoryKernel::exponential(0.5, 1.0, 1.0);
  InitialData data;
  data.psi0.kind = ProfileSpec::Kind::GaussianBump;
  data.psi0.amplitude = 0.9;
  StateField st = init_state(sp, data, p, k, MemoryRepr::History, 0.25, 4.0);
  st.time = 3.25;
  std::string path = "/tmp/jmgt_test_snapshot.bin";
  write_snapshot(path, st);
  StateField back = read_snapshot(path, sp);
  CHECK(back.time == st.time);
  CHECK(back.repr == MemoryRepr::History);
  CHECK(back.eta.n_r == st.eta.n_r);
  for (std::size_t i = 0; i < st.psi.size(); i++) {
    CHECK(back.psi[i] == st.psi[i]);
    CHECK(back.eta.at_age(2)[i] == st.eta.at_age(2)[i]);
  }
  std::remove(path.c_str());
}

TEST_CASE("cli exit codes") {
  CHECK(run_cli("validate-kernel -o /tmp/jmgt_cli_a") == 0);
  CHECK(run_cli("validate-kernel -o /tmp/jmgt_cli_b --set /kernel/m=2.0") == 2);
  CHECK(run_cli("bogus-subcommand") == 64);
  CHECK(run_cli("simulate -o /tmp/jmgt_cli_c --set /medium/k=1.0") == 64);  // exact_linear + k != 0

  // malformed kernel CSV -> usage/data error
  {
    std::ofstream csv("/tmp/jmgt_bad_kernel.csv");
    csv << "0.0,1.0\nnot,numbers_here_x\n";
  }
  CHECK(run_cli("validate-kernel -o /tmp/jmgt_cli_d --set /kernel/kind=csv "
                "--set /kernel/csv_path=/tmp/jmgt_bad_kernel.csv") == 64);

  // fault injection: mis-signed F3 must trip the inequality gate
  std::string verify_args =
      " --set /solver/memory=history --set /grid/N=32 --set /grid/L=12.566370614359172"
      " --set /solver/dt=0.05 --set /solver/t_end=1.0"
      " --set /initial/psi0/kind=band_random --set /initial/psi0/amplitude=1.0"
      " --set /initial/psi1/kind=band_random --set /initial/psi1/amplitude=1.0"
      " --set /solver/r_max_factor=16.0";
  CHECK(run_cli("verify -o /tmp/jmgt_cli_e" + verify_args) == 0);
  CHECK(run_cli("verify -o /tmp/jmgt_cli_f --inject-f3-sign-flip" + verify_args) == 4);
  // reduced-z config asking for the eta-weighted functionals
  CHECK(run_cli("verify -o /tmp/jmgt_cli_g --set /solver/memory=reduced_z") == 64);
}

TEST_CASE("reproducible runs emit byte-identical CSV") {
  std::string args =
      "simulate --reproducible --set /solver/t_end=0.5 --set /solver/dt=0.01 "
      "--set /initial/psi0/kind=band_random --set /initial/psi0/amplitude=1.0 "
      "--set /grid/N=64";
  CHECK(run_cli(args + " -o /tmp/jmgt_repro1") == 0);
  CHECK(run_cli(args + " -o /tmp/jmgt_repro2") == 0);
  CHECK(slurp("/tmp/jmgt_repro1/trajectory.csv") == slurp("/tmp/jmgt_repro2/trajectory.csv"));
  CHECK(!slurp("/tmp/jmgt_repro1/trajectory.csv").empty());
}
