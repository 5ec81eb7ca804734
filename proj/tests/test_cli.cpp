#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>

using namespace std::filesystem;

namespace {

std::string bin() {
  const char* b = std::getenv("LPSROM_BIN");
  REQUIRE(b != nullptr);
  return b;
}

int run(const std::string& args) {
  std::string cmd = bin() + " " + args + " >> cli_test.log 2>&1";
  int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

std::string slurp(const path& p) {
  std::ifstream is(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

struct Workspace {
  path dir;
  Workspace() {
    dir = temp_directory_path() / "lpsrom_cli_test";
    remove_all(dir);
    create_directories(dir);
    std::ofstream cfg(dir / "smoke.ini");
    cfg << "# rectangle channel smoke configuration\n"
           "mesh.kind = rect\n"
           "mesh.nx = 12\n"
           "mesh.ny = 6\n"
           "mesh.width = 2.2\n"
           "mesh.height = 0.41\n"
           "fom.nu = 1e-2\n"
           "fom.dt = 5e-3\n"
           "fom.t_end = 0.1\n"
           "fom.sigma = 0\n"
           "fom.outlet = do_nothing\n"
           "fom.scheme = bdf2\n"
           "fom.stride = 2\n"
           "fom.window_start = 0.02\n"
           "fom.window_end = 0.1\n"
           "pod.r = 4\n"
           "pod.center = true\n"
           "rom.r = 3\n"
           "analyze.r_max = 3\n";
    cfg << "out.dir = " << (dir / "out").string() << "\n";
  }
  std::string cfg() const { return (dir / "smoke.ini").string(); }
  path out(const std::string& name) const { return dir / "out" / name; }
};

}  // namespace

TEST_CASE("full pipeline smoke run on a small rectangle completes quickly") {
  Workspace ws;
  auto t0 = std::chrono::steady_clock::now();
  CHECK(run("mesh --config " + ws.cfg()) == 0);
  CHECK(run("fom-run --config " + ws.cfg()) == 0);
  CHECK(run("pod-build --config " + ws.cfg()) == 0);
  CHECK(run("rom-run --config " + ws.cfg()) == 0);
  CHECK(run("analyze --config " + ws.cfg()) == 0);
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  MESSAGE("pipeline wall time ", secs, " s");
  CHECK(secs < 60.0);

  CHECK(exists(ws.out("mesh.txt")));
  CHECK(exists(ws.out("snapshots.bin")));
  CHECK(exists(ws.out("fom_qoi.csv")));
  CHECK(exists(ws.out("basis.bin")));
  CHECK(exists(ws.out("eigenvalues.csv")));
  CHECK(exists(ws.out("rom_trajectory_r3.csv")));
  CHECK(exists(ws.out("rom_qoi_r3.csv")));
  CHECK(exists(ws.out("infsup.csv")));
  CHECK(exists(ws.out("errors.csv")));
  CHECK(exists(ws.out("summary.txt")));

  // summary carries the Table-1-style keys
  std::string summary = slurp(ws.out("summary.txt"));
  CHECK(summary.find("c_d_max=") != std::string::npos);
  CHECK(summary.find("c_l_max=") != std::string::npos);
  CHECK(summary.find("strouhal=") != std::string::npos);

  // deterministic re-run: byte-identical CSV outputs
  std::string qoi_before = slurp(ws.out("fom_qoi.csv"));
  CHECK(run("fom-run --config " + ws.cfg()) == 0);
  CHECK(slurp(ws.out("fom_qoi.csv")) == qoi_before);

  std::string traj_before = slurp(ws.out("rom_trajectory_r3.csv"));
  CHECK(run("rom-run --config " + ws.cfg()) == 0);
  CHECK(slurp(ws.out("rom_trajectory_r3.csv")) == traj_before);
}

TEST_CASE("exit codes: usage 1, missing input 2, numerical failure 3") {
  Workspace ws;
  CHECK(run("definitely-not-a-command") == 1);
  CHECK(run("mesh --config /nonexistent.ini") == 2);
  // fom before mesh: missing input
  CHECK(run("fom-run --config " + ws.cfg()) == 2);
  // invalid parameter in an override: usage
  CHECK(run("mesh --config " + ws.cfg() + " --set mesh.kind=hexagons") == 1);
  CHECK(run("mesh --config " + ws.cfg() + " --set not.a.key=1") == 1);

  // rank error surfaces as a numerical failure naming the rank
  CHECK(run("mesh --config " + ws.cfg()) == 0);
  CHECK(run("fom-run --config " + ws.cfg()) == 0);
  CHECK(run("pod-build --config " + ws.cfg() + " -r 50") == 3);
}
