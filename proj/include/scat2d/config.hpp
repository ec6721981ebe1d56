#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "scat2d/levinson.hpp"
#include "scat2d/threshold.hpp"
#include "scat2d/waveop.hpp"

namespace scat2d {

enum class Command { Sweep, Classify, Tune, Levinson, Waveop, Selftest };

struct RunConfig {
  Command command = Command::Sweep;

  PotentialSpec potential;
  double g = 1.0;

  struct Grid {
    double radius = 1.0;
    int n_radial = 8;
    int n_angular = 16;
    int m_angles = 32;
  } grid;

  struct Sweep {
    double lambda_min = 1e-6;
    double lambda_max = 25.0;
    int points = 151;
  } sweep;

  struct Tol {
    double null_tol = kDefaultNullTol;
    double g_tol = 1e-11;
  } tol;

  struct Tune {
    Target target = Target::SResonance;
    double g_lo = 1.0;
    double g_hi = 20.0;
  } tune;

  struct Levinson {
    double box_radius = 0.0;
    int n_fd = 80;
  } levinson;

  struct Packet {
    int n = 256;
    double L = 128.0;
    double k0x = 1.35, k0y = 0.0;
    double sigma = 4.0;
    double cx = 0.0, cy = 0.0;
    double window_lo = 0.5, window_hi = 4.0;
  } packet;
  WaveopSpec waveop;

  std::string output;  // CSV path; empty: stdout
  std::string snapshot; // optional waveop snapshot path
};

/// Parses flat `key = value` lines grouped by `[section]` headers ('#' starts a
/// comment). Overrides have the form `section.key=value` and are applied after
/// the file. ConfigParse on unknown keys, malformed values or failed checks.
RunConfig parse_config(std::istream& in, const std::vector<std::string>& overrides = {});
RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides = {});

std::string_view command_name(Command c);

}  // namespace scat2d
