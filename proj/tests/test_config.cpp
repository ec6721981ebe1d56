#include <doctest.h>

#include <sstream>

#include "scat2d/config.hpp"

using namespace scat2d;

namespace {
RunConfig parse(const std::string& text, const std::vector<std::string>& overrides = {}) {
  std::istringstream in(text);
  return parse_config(in, overrides);
}

bool rejects(const std::string& text, const std::vector<std::string>& overrides = {}) {
  try {
    parse(text, overrides);
  } catch (const Error& e) {
    return e.kind() == ErrorKind::ConfigParse;
  }
  return false;
}
}  // namespace

TEST_CASE("sections, comments and typed values") {
  const RunConfig c = parse(R"(
# leading comment
[run]
command = classify   # trailing comment
output = out.csv

[potential]
kind = square_well
radius = 1.5
g = 5.7832

[grid]
n_radial = 10
n_angular = 20

[tol]
null_tol = 1e-5
)");
  CHECK(c.command == Command::Classify);
  CHECK(c.output == "out.csv");
  CHECK(c.potential.kind == PotentialKind::SquareWell);
  CHECK(c.potential.radius == 1.5);
  CHECK(c.g == 5.7832);
  CHECK(c.grid.n_radial == 10);
  CHECK(c.grid.n_angular == 20);
  CHECK(c.grid.m_angles == 32);
  CHECK(c.tol.null_tol == 1e-5);
}

TEST_CASE("defaults are valid") {
  const RunConfig c = parse("");
  CHECK(c.command == Command::Sweep);
  CHECK(c.potential.kind == PotentialKind::Gaussian);
  CHECK(c.waveop.m == 64);
  CHECK(command_name(Command::Waveop) == "waveop");
}

TEST_CASE("overrides apply after the file") {
  const RunConfig c = parse("[potential]\ng = 2\n", {"potential.g=3.5", "sweep.points = 11", "waveop.T=4"});
  CHECK(c.g == 3.5);
  CHECK(c.sweep.points == 11);
  CHECK(c.waveop.T0 == 4.0);
}

TEST_CASE("malformed input is a ConfigParse error") {
  CHECK(rejects("[potential]\ncolour = red\n"));
  CHECK(rejects("g = 1\n"));
  CHECK(rejects("[potential\n"));
  CHECK(rejects("[potential]\ng\n"));
  CHECK(rejects("[potential]\ng = one\n"));
  CHECK(rejects("[potential]\ng = 1.0x\n"));
  CHECK(rejects("[grid]\nn_radial = 2.5\n"));
  CHECK(rejects("[potential]\nkind = cube\n"));
  CHECK(rejects("[run]\ncommand = plot\n"));
  CHECK(rejects("[tune]\ntarget = d_resonance\n"));
  CHECK(rejects("", {"nonsense"}));
  CHECK(rejects("", {"grid.bogus=1"}));
}

TEST_CASE("numeric fields are range checked") {
  CHECK(rejects("[grid]\nradius = 0\n"));
  CHECK(rejects("[grid]\nn_radial = -4\n"));
  CHECK(rejects("[sweep]\nlambda_min = 2\nlambda_max = 1\n"));
  CHECK(rejects("[sweep]\npoints = 1\n"));
  CHECK(rejects("[tol]\nnull_tol = 0\n"));
  CHECK(rejects("[tune]\ng_lo = 5\ng_hi = 5\n"));
  CHECK(rejects("[packet]\nsigma = -1\n"));
  CHECK(rejects("[waveop]\ndt = 0\n"));
  CHECK(rejects("[potential]\nwidth = -1\n"));
  CHECK(rejects("[potential]\nkind = ring\ninner = 0.5\nouter = 0.4\n"));
}

TEST_CASE("missing file") {
  try {
    load_config("/nonexistent/scat2d.cfg");
    FAIL("expected ConfigParse");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ConfigParse);
  }
}
