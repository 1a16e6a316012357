#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "fefp/closure.hpp"
#include "fefp/kinetics.hpp"

namespace fefp {

enum class Scenario { kHomogeneous, kShockPlate };
enum class InitialState { kMaxwellian, kAnisotropic, kBiGaussian };

/// Parsed run configuration. Everything is stored in internal
/// nondimensional units (rho_ref = theta_ref = tau_ref = 1); lengths of the
/// shock geometry are in L_ref.
struct SimulationConfig {
  Scenario scenario = Scenario::kHomogeneous;
  closure::DriftModel model = closure::DriftModel::kFefp;
  GasModel gas = GasModel::maxwell();
  closure::ClosureOptions closure;

  std::uint64_t seed = 1;
  int threads = 1;
  std::string output_dir = "out";
  int output_every = 100;
  bool emit_plots = false;

  std::size_t n_particles = 100000;
  double dt = 0.01;

  // homogeneous
  InitialState initial = InitialState::kAnisotropic;
  Vec3 lambda{1.5, 1.0, 0.5};
  double shift = 0.5;
  double var_plus = 1.2;
  double var_minus = 0.55;
  int steps = 200;

  // shock
  double Ma = 4.0;
  double Kn = 0.14;
  int nx = 60;
  int ny = 60;
  double Lx = 2.5;
  double Ly = 3.0;
  double plate_length = 1.0;
  double wall_theta = 1.0;
  double slice_y = 1.875;
  int steps_transient = 2000;
  int steps_average = 5000;
  int audit_every = 100;

  /// Every key = value pair as read, in file order ("section.key").
  std::vector<std::pair<std::string, std::string>> echo;

  /// Throws ConfigError when an invariant is violated.
  void validate() const;
};

/// Parses the sectioned key = value format documented in the README.
/// Throws ConfigError on syntax errors, unknown keys or invalid values.
SimulationConfig parse_config(std::istream& in);
SimulationConfig load_config(const std::string& path);

void write_config_echo(std::ostream& os, const SimulationConfig& cfg);

}  // namespace fefp
