#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

const fs::path kScratch = fs::path(TRAPDOOR_TEST_SCRATCH) / "cli";

struct Result {
  int code = -1;
  std::string out;
};

Result run(const std::string& args, const std::string& env = "") {
  fs::create_directories(kScratch);
  const fs::path capture = kScratch / "stdout.txt";
  const std::string cmd = env + " " + std::string(TRAPDOOR_CLI) + " " + args +
                          " > " + capture.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  Result r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(capture);
  std::stringstream ss;
  ss << in.rdbuf();
  r.out = ss.str();
  return r;
}

std::string read(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("usage errors exit with 2") {
  CHECK(run("").code == 2);
  CHECK(run("nonsense").code == 2);
  CHECK(run("solve --grid 1").code == 2);
  CHECK(run("solve --bogus-flag").code == 2);
  CHECK(run("simulate --mode bogus").code == 2);
  CHECK(run("codec --N 10 --message 100").code == 2);
  CHECK(run("codec --replay-output 10x1").code == 2);
}

TEST_CASE("help exits cleanly") { CHECK(run("--help").code == 0); }

TEST_CASE("constants") {
  const auto r = run("constants");
  CHECK(r.code == 0);
  CHECK(r.out.find("rho 0.69424191363061") != std::string::npos);
  CHECK(r.out.find("b4  0.76393202250021") != std::string::npos);
  CHECK(run("constants --json").out.find("\"phi\"") != std::string::npos);
}

TEST_CASE("codec replay prints the backward decoding") {
  const auto r = run("codec --replay-output 1011010001");
  CHECK(r.code == 0);
  const char* rows[] = {"1011010001  channel output",
                        "*110111001  differential output",
                        "         0  Given",
                        "        10  Case 3",
                        "       010  Case 1 or 2",
                        "      0010  Case 1",
                        "     10010  Case 3",
                        "    010010  Case 2",
                        "   1010010  Case 3",
                        "  01010010  Case 1 or 2",
                        " 101010010  Case 3",
                        "0101010010  Case 2"};
  for (const char* row : rows) CHECK_MESSAGE(r.out.find(row) != std::string::npos, row);
}

TEST_CASE("codec round trip through the simulated channel") {
  for (int seed = 0; seed < 5; ++seed)
    for (int m : {0, 17, 88}) {
      const auto r = run("codec --N 10 --message " + std::to_string(m) +
                         " --seed " + std::to_string(seed) + " --state 1 --trace");
      CHECK(r.code == 0);
      CHECK(r.out.find("decoded  " + std::to_string(m) + "  ok") != std::string::npos);
    }
}

TEST_CASE("solve writes csv files under --out only") {
  const fs::path dir = kScratch / "solve0";
  fs::remove_all(dir);
  const auto r = run("solve --grid 11 --actions 21 --iters 0 --steps 100 --out " +
                     dir.string());
  CHECK(r.code != 2);
  for (const char* f : {"value.csv", "differential.csv", "policy.csv",
                        "histogram.csv", "solve.json"})
    CHECK_MESSAGE(fs::exists(dir / f), f);
  const std::string v = read(dir / "value.csv");
  CHECK(v.rfind("# trapdoor-csv v1 value_function\nz,value\n", 0) == 0);
  std::istringstream in(v);
  std::string line;
  std::getline(in, line);
  std::getline(in, line);
  int rows = 0;
  while (std::getline(in, line)) {
    CHECK(line.substr(line.find(',') + 1) == "0");
    ++rows;
  }
  CHECK(rows == 11);
}

TEST_CASE("output directory from the environment") {
  const fs::path dir = kScratch / "envdir";
  fs::remove_all(dir);
  const auto r = run("simulate --mode rate-table --N 20",
                     "TRAPDOOR_OUT_DIR=" + dir.string());
  CHECK(r.code == 0);
  CHECK(fs::exists(dir / "report.json"));
}

TEST_CASE("nothing is written without an output path") {
  const fs::path dir = kScratch / "quiet";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const auto r = run("simulate --mode flush --trials 1000", "cd " + dir.string() + " &&");
  CHECK(r.code == 0);
  CHECK(fs::is_empty(dir));
}

TEST_CASE("unwritable output path fails") {
  const fs::path file = kScratch / "plainfile";
  std::ofstream(file) << "x";
  const auto r = run("simulate --mode rate-table --N 10 --out " + (file / "sub").string());
  CHECK(r.code == 1);
}

TEST_CASE("simulate runs each mode") {
  CHECK(run("simulate --mode flush --trials 100000").code == 0);
  CHECK(run("simulate --mode codec-roundtrip --N 10 --trials 20 --exhaustive").code == 0);
  CHECK(run("simulate --mode rate-table --N 64").code == 0);
  const auto r = run("simulate --mode dp-sim --conjectured --steps 100000 --json");
  CHECK(r.code == 0);
  CHECK(r.out.find("\"schema\": \"trapdoor.report/1\"") != std::string::npos);
}

TEST_CASE("seeded runs are reproducible") {
  const auto a = run("simulate --mode flush --trials 20000 --seed 5 --json");
  const auto b = run("simulate --mode flush --trials 20000 --seed 5 --json");
  CHECK(a.out == b.out);
}

TEST_CASE("verify on a coarse grid, and its negative control") {
  const fs::path dir = kScratch / "verify";
  fs::remove_all(dir);
  CHECK(run("verify --grid 301 --actions 601 --iters 5 --out " + dir.string()).code == 0);
  CHECK(fs::exists(dir / "verify.json"));
  CHECK(read(dir / "iterates.csv").rfind("# trapdoor-csv v1 iterates\n", 0) == 0);

  const fs::path bad = kScratch / "verify_bad";
  fs::remove_all(bad);
  const auto r = run("verify --grid 301 --actions 601 --iters 5 --rho 0.70 --out " +
                     bad.string());
  CHECK(r.code == 1);
  CHECK(read(bad / "verify.json").find("\"passed\": false") != std::string::npos);

  const auto one = run("verify --grid 301 --actions 601 --iters 1");
  CHECK(one.out.find("[PASS] monotone_nonincreasing") != std::string::npos);
}
