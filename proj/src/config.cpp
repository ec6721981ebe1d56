#include "scat2d/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace scat2d {
namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

[[noreturn]] void fail(const std::string& what) { throw Error(ErrorKind::ConfigParse, what); }

double to_double(const std::string& key, const std::string& v) {
  double x = 0.0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || p != v.data() + v.size()) fail(key + ": not a number: '" + v + "'");
  return x;
}

int to_int(const std::string& key, const std::string& v) {
  int x = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || p != v.data() + v.size()) fail(key + ": not an integer: '" + v + "'");
  return x;
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;

template <typename F>
Setter num(F field) {
  return [field](RunConfig& c, const std::string& k, const std::string& v) { field(c) = to_double(k, v); };
}
template <typename F>
Setter integer(F field) {
  return [field](RunConfig& c, const std::string& k, const std::string& v) { field(c) = to_int(k, v); };
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"run.command",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         static const std::map<std::string, Command> names = {
             {"sweep", Command::Sweep},       {"classify", Command::Classify}, {"tune", Command::Tune},
             {"levinson", Command::Levinson}, {"waveop", Command::Waveop},     {"selftest", Command::Selftest}};
         const auto it = names.find(v);
         if (it == names.end()) fail(k + ": unknown command '" + v + "'");
         c.command = it->second;
       }},
      {"run.output", [](RunConfig& c, const std::string&, const std::string& v) { c.output = v; }},
      {"run.snapshot", [](RunConfig& c, const std::string&, const std::string& v) { c.snapshot = v; }},

      {"potential.kind",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         if (v == "gaussian")
           c.potential.kind = PotentialKind::Gaussian;
         else if (v == "square_well")
           c.potential.kind = PotentialKind::SquareWell;
         else if (v == "ring")
           c.potential.kind = PotentialKind::Ring;
         else
           fail(k + ": unknown potential kind '" + v + "'");
       }},
      {"potential.g", num([](RunConfig& c) -> double& { return c.g; })},
      {"potential.width", num([](RunConfig& c) -> double& { return c.potential.width; })},
      {"potential.radius", num([](RunConfig& c) -> double& { return c.potential.radius; })},
      {"potential.sign", num([](RunConfig& c) -> double& { return c.potential.sign; })},
      {"potential.inner", num([](RunConfig& c) -> double& { return c.potential.inner; })},
      {"potential.outer", num([](RunConfig& c) -> double& { return c.potential.outer; })},
      {"potential.height", num([](RunConfig& c) -> double& { return c.potential.height; })},

      {"grid.radius", num([](RunConfig& c) -> double& { return c.grid.radius; })},
      {"grid.n_radial", integer([](RunConfig& c) -> int& { return c.grid.n_radial; })},
      {"grid.n_angular", integer([](RunConfig& c) -> int& { return c.grid.n_angular; })},
      {"grid.m_angles", integer([](RunConfig& c) -> int& { return c.grid.m_angles; })},

      {"sweep.lambda_min", num([](RunConfig& c) -> double& { return c.sweep.lambda_min; })},
      {"sweep.lambda_max", num([](RunConfig& c) -> double& { return c.sweep.lambda_max; })},
      {"sweep.points", integer([](RunConfig& c) -> int& { return c.sweep.points; })},

      {"tol.null_tol", num([](RunConfig& c) -> double& { return c.tol.null_tol; })},
      {"tol.g_tol", num([](RunConfig& c) -> double& { return c.tol.g_tol; })},

      {"tune.target",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         if (v == "s_resonance")
           c.tune.target = Target::SResonance;
         else if (v == "p_resonance")
           c.tune.target = Target::PResonance;
         else if (v == "zero_bound")
           c.tune.target = Target::ZeroBound;
         else
           fail(k + ": unknown target '" + v + "'");
       }},
      {"tune.g_lo", num([](RunConfig& c) -> double& { return c.tune.g_lo; })},
      {"tune.g_hi", num([](RunConfig& c) -> double& { return c.tune.g_hi; })},

      {"levinson.box_radius", num([](RunConfig& c) -> double& { return c.levinson.box_radius; })},
      {"levinson.n_fd", integer([](RunConfig& c) -> int& { return c.levinson.n_fd; })},

      {"packet.n", integer([](RunConfig& c) -> int& { return c.packet.n; })},
      {"packet.L", num([](RunConfig& c) -> double& { return c.packet.L; })},
      {"packet.k0x", num([](RunConfig& c) -> double& { return c.packet.k0x; })},
      {"packet.k0y", num([](RunConfig& c) -> double& { return c.packet.k0y; })},
      {"packet.sigma", num([](RunConfig& c) -> double& { return c.packet.sigma; })},
      {"packet.cx", num([](RunConfig& c) -> double& { return c.packet.cx; })},
      {"packet.cy", num([](RunConfig& c) -> double& { return c.packet.cy; })},
      {"packet.window_lo", num([](RunConfig& c) -> double& { return c.packet.window_lo; })},
      {"packet.window_hi", num([](RunConfig& c) -> double& { return c.packet.window_hi; })},

      {"waveop.lambda_lo", num([](RunConfig& c) -> double& { return c.waveop.lambda_lo; })},
      {"waveop.lambda_hi", num([](RunConfig& c) -> double& { return c.waveop.lambda_hi; })},
      {"waveop.ds", num([](RunConfig& c) -> double& { return c.waveop.ds; })},
      {"waveop.m", integer([](RunConfig& c) -> int& { return c.waveop.m; })},
      {"waveop.T", num([](RunConfig& c) -> double& { return c.waveop.T0; })},
      {"waveop.dt", num([](RunConfig& c) -> double& { return c.waveop.dt; })},
      {"waveop.probes", integer([](RunConfig& c) -> int& { return c.waveop.probes; })},
  };
  return table;
}

void assign(RunConfig& c, const std::string& key, const std::string& value, const std::string& where) {
  const auto it = setters().find(key);
  if (it == setters().end()) fail(where + "unknown key '" + key + "'");
  it->second(c, key, value);
}

void check(bool ok, const std::string& what) {
  if (!ok) fail(what);
}

void validate_config(const RunConfig& c) {
  check(c.grid.radius > 0.0, "grid.radius must be positive");
  check(c.grid.n_radial > 0 && c.grid.n_angular > 0 && c.grid.m_angles > 0, "grid sizes must be positive");
  check(c.sweep.lambda_min > 0.0 && c.sweep.lambda_max > c.sweep.lambda_min,
        "sweep needs 0 < lambda_min < lambda_max");
  check(c.sweep.points >= 2, "sweep.points must be at least 2");
  check(c.tol.null_tol > 0.0 && c.tol.g_tol > 0.0, "tolerances must be positive");
  check(c.tune.g_hi > c.tune.g_lo && c.tune.g_lo > 0.0, "tune needs 0 < g_lo < g_hi");
  check(c.levinson.box_radius >= 0.0 && c.levinson.n_fd > 0, "levinson box_radius >= 0 and n_fd > 0");
  check(c.packet.n >= 8 && c.packet.L > 0.0 && c.packet.sigma > 0.0, "packet needs n >= 8, L > 0, sigma > 0");
  check(c.packet.window_lo > 0.0 && c.packet.window_hi > c.packet.window_lo, "packet window must be 0 < lo < hi");
  check(c.waveop.lambda_lo > 0.0 && c.waveop.lambda_hi > c.waveop.lambda_lo && c.waveop.ds > 0.0,
        "waveop log grid must be 0 < lambda_lo < lambda_hi, ds > 0");
  check(c.waveop.m > 0 && c.waveop.T0 > 0.0 && c.waveop.dt > 0.0 && c.waveop.probes >= 0,
        "waveop m, T, dt must be positive");
  check(std::isfinite(c.g), "potential.g must be finite");
  try {
    validate(c.potential);
  } catch (const Error& e) {
    fail(e.what());
  }
}

}  // namespace

std::string_view command_name(Command c) {
  switch (c) {
    case Command::Sweep: return "sweep";
    case Command::Classify: return "classify";
    case Command::Tune: return "tune";
    case Command::Levinson: return "levinson";
    case Command::Waveop: return "waveop";
    case Command::Selftest: return "selftest";
  }
  return "?";
}

RunConfig parse_config(std::istream& in, const std::vector<std::string>& overrides) {
  RunConfig c;
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const std::string where = "line " + std::to_string(lineno) + ": ";
    if (t.front() == '[') {
      if (t.back() != ']') fail(where + "unterminated section header");
      section = trim(std::string_view(t).substr(1, t.size() - 2));
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) fail(where + "expected key = value");
    const std::string key = trim(std::string_view(t).substr(0, eq));
    const std::string value = trim(std::string_view(t).substr(eq + 1));
    if (section.empty()) fail(where + "key '" + key + "' outside of a section");
    assign(c, section + "." + key, value, where);
  }
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos) fail("override '" + o + "' is not section.key=value");
    assign(c, trim(std::string_view(o).substr(0, eq)), trim(std::string_view(o).substr(eq + 1)), "override: ");
  }
  validate_config(c);
  return c;
}

RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) fail("cannot read config file '" + path + "'");
  return parse_config(in, overrides);
}

}  // namespace scat2d
