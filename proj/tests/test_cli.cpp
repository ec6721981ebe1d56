#include <doctest.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

// stderr is discarded; only stdout and the exit status are inspected
Run run(const std::string& args) {
  const std::string cmd = std::string(SCAT2D_CLI) + " " + args + " 2>/dev/null";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  std::array<char, 4096> buf{};
  while (fgets(buf.data(), buf.size(), p)) r.out += buf.data();
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

fs::path scratch(const std::string& name, const std::string& text) {
  const fs::path p = fs::temp_directory_path() / ("scat2d_cli_" + name);
  std::ofstream(p) << text;
  return p;
}

std::string read(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string config(const std::string& name) { return std::string(SCAT2D_CONFIG_DIR) + "/" + name; }

}  // namespace

TEST_CASE("exit codes") {
  CHECK(run("sweep --config /nonexistent/x.cfg").code == 2);
  CHECK(run("sweep --config " + scratch("bad.cfg", "[potential]\nflavour = 1\n").string()).code == 2);
  CHECK(run("frobnicate --config " + config("selftest.cfg")).code == 2);
  CHECK(run("sweep").code == 2);
  CHECK(run("sweep --config " + config("sweep_free.cfg") + " --set grid.bogus=1").code == 2);
  // a repulsive sign with an s-resonance target has no crossing to find
  const Run r = run("tune --config " + config("tune_s_resonance.cfg") + " --set potential.sign=1 --set tune.g_hi=12");
  CHECK(r.code == 1);
}

TEST_CASE("free sweep CSV") {
  const Run r = run("sweep --config " + config("sweep_free.cfg") + " --no-timestamp");
  REQUIRE(r.code == 0);
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  CHECK(line == "lambda,s_minus_1_norm,unitarity_defect,cond_M");
  int rows = 0;
  while (std::getline(in, line) && line.front() != '#') {
    std::istringstream row(line);
    std::string lambda, s1;
    std::getline(row, lambda, ',');
    std::getline(row, s1, ',');
    CHECK(std::stod(s1) <= 1e-12);
    ++rows;
  }
  CHECK(rows == 41);
  CHECK(r.out.find("# failed = 0") != std::string::npos);
}

TEST_CASE("classify reports the p-resonance") {
  const Run r = run("classify --config " + config("classify_p_resonance.cfg") + " --no-timestamp");
  REQUIRE(r.code == 0);
  CHECK(r.out.find("\n# n_p = 2\n") != std::string::npos);
  CHECK(r.out.find("# n_s = 0\n") != std::string::npos);
}

TEST_CASE("determinism, timestamp flag and output file") {
  const std::string base = "sweep --config " + config("sweep_free.cfg") + " --set potential.g=1 --set sweep.points=7";
  const Run a = run(base + " --no-timestamp"), b = run(base + " --no-timestamp");
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out.find("# generated") == std::string::npos);
  const Run stamped = run(base);
  CHECK(stamped.out.find("# generated") != std::string::npos);

  const fs::path out = fs::temp_directory_path() / "scat2d_cli_out.csv";
  const Run f = run(base + " --no-timestamp --set run.output=" + out.string());
  REQUIRE(f.code == 0);
  CHECK(read(out) == a.out);
  CHECK(f.out.find("max_unitarity_defect = ") != std::string::npos);
  fs::remove(out);
}

TEST_CASE("selftest and tune") {
  const Run s = run("selftest --config " + config("selftest.cfg") + " --no-timestamp");
  REQUIRE(s.code == 0);
  CHECK(s.out.rfind("check,value\n", 0) == 0);
  CHECK(s.out.find("# pass = true") != std::string::npos);

  const Run t = run("tune --config " + config("tune_s_resonance.cfg") + " --no-timestamp");
  REQUIRE(t.code == 0);
  const auto at = t.out.find("# g_star = ");
  REQUIRE(at != std::string::npos);
  CHECK(std::abs(std::stod(t.out.substr(at + 11)) - 14.68197) <= 1e-2);
}
