#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fefp/config.hpp"
#include "fefp/diagnostics.hpp"

namespace fefp {

struct HomogeneousRow {
  double t = 0.0;
  std::array<double, 6> sigma{};  // xx, xy, xz, yy, yz, zz
  Vec3 q{};
  double H = 0.0;
  double I = 0.0;
  double res_moment = 0.0;
  double res_entropy = 0.0;
  double theta = 0.0;
  double tau = 0.0;
  bool fallback = false;
};

struct HomogeneousResult {
  std::vector<HomogeneousRow> rows;
  std::size_t fallbacks = 0;
};

inline constexpr const char* kHomogeneousHeader = "t,sxx,sxy,sxz,syy,syz,szz,qx,qy,qz,H,I,res_moment,res_entropy";
inline constexpr const char* kFieldHeader = "x1,x2,rho,ux,uy,T,Ma,n_samples";

/// Velocity samples of the configured homogeneous initial state (unit density).
ParticleArrays homogeneous_initial_state(const SimulationConfig& cfg);

/// Single-cell relaxation. One row per step (before the update) plus the final
/// state; streamed to `csv` when given.
HomogeneousResult run_homogeneous(const SimulationConfig& cfg, std::ostream* csv = nullptr);

void write_homogeneous_row(std::ostream& os, const HomogeneousRow& row);

/// Steady-averaged cell values in output units: x in L_ref, rho / rho_inf,
/// speeds / sqrt(2 theta_ref), T / T_inf.
struct FieldPoint {
  double x1 = 0.0;
  double x2 = 0.0;
  double rho = 0.0;
  double ux = 0.0;
  double uy = 0.0;
  double T = 0.0;
  double Ma = 0.0;
  std::size_t n_samples = 0;
};

struct ConservationSummary {
  std::size_t audited_steps = 0;
  std::size_t audited_cells = 0;
  double max_momentum_rel = 0.0;
  double max_energy_rel = 0.0;
};

struct ShockResult {
  int nx = 0;
  int ny = 0;
  double L_ref = 0.0;
  double particle_weight = 0.0;
  std::vector<FieldPoint> field;
  std::vector<FieldPoint> slice;
  std::optional<ShockMetrics> metrics;
  ConservationSummary conservation;
  std::size_t final_particles = 0;
  std::size_t fallback_cell_steps = 0;
  std::size_t closed_cell_steps = 0;
};

/// Full particle time loop for the flat-plate problem:
/// stream, boundaries and inflow, binning, per-cell closure, averaging,
/// velocity update. Progress goes to `log` when given. Throws BlowUpError
/// (with a dump of the offending cell) when a cell's state turns non-finite.
ShockResult run_shock(const SimulationConfig& cfg, std::ostream* log = nullptr);

void write_field_csv(std::ostream& os, const std::vector<FieldPoint>& points);

/// matplotlib script that renders the CSVs found next to it.
void write_plot_script(std::ostream& os, Scenario scenario);

}  // namespace fefp
