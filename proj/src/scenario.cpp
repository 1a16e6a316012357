#include "fefp/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "fefp/closure.hpp"
#include "fefp/domain.hpp"
#include "fefp/error.hpp"
#include "fefp/integrator.hpp"
#include "fefp/moments.hpp"
#include "fefp/parallel.hpp"
#include "fefp/rng.hpp"

namespace fefp {

namespace {

constexpr double kGamma = 5.0 / 3.0;

// max over the matched basis of |<grad H . A> + D <lap H> - P_H|, each scaled
// by rho theta^(deg H / 2) / tau
double moment_residual(const closure::CellClosure& cc, const MomentSet& m, const GasModel& gas) {
  if (cc.frozen) return 0.0;
  const closure::BasisSet& basis = closure::BasisSet::heat_flux_3d();
  const VectorPoly A = cc.drift.to_poly();
  const double D = cc.theta / cc.tau;
  const auto P = closure::production_terms(m, gas).for_basis();
  double worst = 0.0;
  for (std::size_t a = 0; a < closure::kMatched; ++a) {
    const Polynomial& H = basis.matched[a];
    const double proj = expectation(dot(gradient(H), A), m) + D * expectation(laplacian(H), m);
    const double scale = m.rho * std::pow(cc.theta, 0.5 * H.degree()) / cc.tau;
    worst = std::max(worst, std::abs(proj - P[a]) / scale);
  }
  return worst;
}

}  // namespace

ParticleArrays homogeneous_initial_state(const SimulationConfig& cfg) {
  ParticleArrays p;
  const std::size_t n = cfg.n_particles;
  p.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    CounterRng rng(cfg.seed, 0, k, StreamTag::kInitialVelocity);
    Vec3 v{rng.normal(), rng.normal(), rng.normal()};
    switch (cfg.initial) {
      case InitialState::kMaxwellian: break;
      case InitialState::kAnisotropic:
        for (std::size_t i = 0; i < 3; ++i) v[i] *= std::sqrt(cfg.lambda[i]);
        break;
      case InitialState::kBiGaussian: {
        const bool plus = rng.uniform() < 0.5;
        const double sd = std::sqrt(plus ? cfg.var_plus : cfg.var_minus);
        for (auto& c : v) c *= sd;
        v[0] += plus ? cfg.shift : -cfg.shift;
        break;
      }
    }
    p.x[k] = p.y[k] = 0.0;
    p.vx[k] = v[0];
    p.vy[k] = v[1];
    p.vz[k] = v[2];
    p.id[k] = k;
  }
  return p;
}

void write_homogeneous_row(std::ostream& os, const HomogeneousRow& r) {
  os << r.t;
  for (double s : r.sigma) os << ',' << s;
  for (double q : r.q) os << ',' << q;
  os << ',' << r.H << ',' << r.I << ',' << r.res_moment << ',' << r.res_entropy << '\n';
}

HomogeneousResult run_homogeneous(const SimulationConfig& cfg, std::ostream* csv) {
  ParticleArrays p = homogeneous_initial_state(cfg);
  HomogeneousResult result;
  if (csv != nullptr) *csv << kHomogeneousHeader << '\n' << std::setprecision(10);
  const VelocityUpdate base{cfg.seed, 0, true};
  for (int step = 0; step <= cfg.steps; ++step) {
    const MomentSet m = estimate_central_moments(p.vx, p.vy, p.vz, 1.0);
    const closure::CellClosure cc = closure::close_cell(m, cfg.model, cfg.gas, cfg.closure);
    HomogeneousRow row;
    row.t = step * cfg.dt;
    for (std::size_t k = 0; k < 6; ++k) row.sigma[k] = m.sigma(closure::kStressPairs[k][0], closure::kStressPairs[k][1]);
    for (int i = 0; i < 3; ++i) row.q[static_cast<std::size_t>(i)] = m.heat_flux(i);
    Matrix3 Pi{};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) Pi[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = m.Pi(i, j) / m.rho;
    const EntropyReport er = gaussian_entropy_fisher(Pi, m.theta(), cc.tau);
    row.H = er.H;
    row.I = er.I;
    row.theta = cc.theta;
    row.tau = cc.tau;
    row.fallback = cc.fallback;
    row.res_moment = moment_residual(cc, m, cfg.gas);
    if (cc.fefp) row.res_entropy = closure::fisher_constraint_residual(*cc.fefp, m);
    result.fallbacks += cc.fallback ? 1 : 0;
    if (csv != nullptr) write_homogeneous_row(*csv, row);
    result.rows.push_back(row);
    if (step == cfg.steps) break;

    VelocityUpdate up = base;
    up.step = static_cast<std::uint64_t>(step) + 1;
    CellVelocities cell{p.vx, p.vy, p.vz, p.id};
    CellAudit audit;
    advance_cell_velocities(cell, cc.drift, cc.theta, cc.tau, cfg.dt, up, &audit);
    if (!std::isfinite(audit.energy_after))
      throw BlowUpError("homogeneous run: non-finite velocities at step " + std::to_string(step + 1));
  }
  return result;
}

namespace {

struct CellSums {
  double n = 0.0;
  double sx = 0.0, sy = 0.0, sz = 0.0, s2 = 0.0;
};

std::string dump_cell(std::size_t c, const Grid2D& grid, std::size_t n, const closure::CellClosure& cc,
                      const MomentSet* m) {
  std::ostringstream os;
  os << std::setprecision(10) << "cell " << c << " (ix " << c % static_cast<std::size_t>(grid.nx) << ", iy "
     << c / static_cast<std::size_t>(grid.nx) << ") particles " << n << " theta " << cc.theta << " tau " << cc.tau
     << " fallback " << cc.fallback;
  if (m != nullptr) {
    os << " rho " << m->rho << " U (" << m->U[0] << ", " << m->U[1] << ", " << m->U[2] << ")"
       << " q (" << m->heat_flux(0) << ", " << m->heat_flux(1) << ", " << m->heat_flux(2) << ")";
  }
  const auto& d = cc.drift;
  os << " drift constant (" << d.constant[0] << ", " << d.constant[1] << ", " << d.constant[2] << ") cubic "
     << d.cubic << " quintic " << d.quintic << " linear [";
  for (double x : d.linear) os << ' ' << x;
  os << " ]";
  return os.str();
}

}  // namespace

ShockResult run_shock(const SimulationConfig& cfg, std::ostream* log) {
  const auto t_start = std::chrono::steady_clock::now();
  ShockResult res;
  const GasModel& gas = cfg.gas;
  const double theta_inf = 1.0, n_inf = 1.0;
  const double U_inf = cfg.Ma * std::sqrt(kGamma * theta_inf);
  res.L_ref = 2.0 * mean_free_path(n_inf, theta_inf, gas) / cfg.Kn;
  const double L = res.L_ref;
  res.nx = cfg.nx;
  res.ny = cfg.ny;

  Grid2D grid(cfg.nx, cfg.ny, cfg.Lx * L, cfg.Ly * L);
  BoundarySpec spec;
  spec.Lx = grid.Lx;
  spec.Ly = grid.Ly;
  spec.edges = {EdgeKind::kOpen, EdgeKind::kOutflow, EdgeKind::kSpecular, EdgeKind::kOpen};
  spec.inflow = {n_inf, {U_inf, 0.0, 0.0}, theta_inf};
  spec.plate = {true, 0.5 * grid.Lx, 0.0, cfg.plate_length * L, cfg.wall_theta};
  spec.validate(grid);

  const std::size_t N0 = cfg.n_particles;
  res.particle_weight = n_inf * grid.Lx * grid.Ly / static_cast<double>(N0);
  const double w = res.particle_weight;
  const double area = grid.cell_area();

  ParticleArrays p;
  p.reserve(N0 + N0 / 4);
  p.resize(N0);
  for (std::size_t k = 0; k < N0; ++k) {
    CounterRng rng(cfg.seed, 0, k, StreamTag::kInitialPosition);
    p.x[k] = rng.uniform() * grid.Lx;
    p.y[k] = rng.uniform() * grid.Ly;
    p.id[k] = k;
  }
  sample_maxwellian(spec.inflow.U, theta_inf, cfg.seed, p.vx, p.vy, p.vz);
  std::uint64_t next_id = N0;

  const std::size_t nc = grid.num_cells();
  std::vector<closure::CellClosure> closures(nc);
  std::vector<CellSums> sums(nc);
  SteadyAccumulator rho_acc(nc);
  std::vector<double> rho_now(nc);
  const int workers = std::max(1, cfg.threads);
  std::vector<ConservationSummary> audit_w(static_cast<std::size_t>(workers));
  std::vector<std::size_t> fallback_w(static_cast<std::size_t>(workers)), closed_w(static_cast<std::size_t>(workers));

  const int total = cfg.steps_transient + cfg.steps_average;
  const int order = closure::required_moment_order(cfg.model);
  for (int step = 1; step <= total; ++step) {
    const auto ustep = static_cast<std::uint64_t>(step);
    stream(p, cfg.dt);
    apply_boundaries(p, spec, cfg.dt, cfg.seed, ustep);
    inject_all_inflow(p, spec, w, cfg.dt, cfg.seed, ustep, next_id);
    bin_particles(p, grid);

    const bool averaging = step > cfg.steps_transient;
    const bool audit_step = step % cfg.audit_every == 0;
    parallel_for(nc, workers, [&](std::size_t b, std::size_t e, std::size_t wk) {
      for (std::size_t c = b; c < e; ++c) {
        const auto [lo, hi] = grid.range(c);
        const std::size_t n = hi - lo;
        std::span<double> vx(p.vx.data() + lo, n), vy(p.vy.data() + lo, n), vz(p.vz.data() + lo, n);
        const double rho = static_cast<double>(n) * w / area;
        rho_now[c] = rho;
        if (averaging) {
          CellSums& s = sums[c];
          s.n += static_cast<double>(n);
          for (std::size_t k = 0; k < n; ++k) {
            s.sx += vx[k];
            s.sy += vy[k];
            s.sz += vz[k];
            s.s2 += vx[k] * vx[k] + vy[k] * vy[k] + vz[k] * vz[k];
          }
        }
        if (n < 2) {
          closures[c] = closure::CellClosure{};
          closures[c].frozen = true;
          continue;
        }
        const MomentSet m = estimate_central_moments(vx, vy, vz, rho, order);
        closures[c] = closure::close_cell(m, cfg.model, gas, cfg.closure);
        const closure::CellClosure& cc = closures[c];
        if (cfg.model != closure::DriftModel::kLinear) {
          ++closed_w[wk];
          fallback_w[wk] += cc.fallback ? 1 : 0;
        }
        CellAudit audit;
        const VelocityUpdate up{cfg.seed, ustep, true};
        advance_cell_velocities({vx, vy, vz, std::span<const std::uint64_t>(p.id.data() + lo, n)}, cc.drift, cc.theta,
                                cc.tau, cfg.dt, up, &audit);
        if (!std::isfinite(audit.energy_after) || !std::isfinite(audit.momentum_after[0]) ||
            !std::isfinite(audit.momentum_after[1]) || !std::isfinite(audit.momentum_after[2]))
          throw BlowUpError("non-finite velocities at step " + std::to_string(step) + ": " +
                            dump_cell(c, grid, n, cc, &m));
        if (audit_step && !cc.frozen) {
          ConservationSummary& a = audit_w[wk];
          ++a.audited_cells;
          double dp = 0.0, pscale = 0.0;
          for (std::size_t i = 0; i < 3; ++i) {
            dp = std::max(dp, std::abs(audit.momentum_after[i] - audit.momentum_before[i]));
            pscale = std::max(pscale, std::abs(audit.momentum_before[i]));
          }
          // thermal momentum scale keeps near-stagnant cells meaningful
          pscale = std::max(pscale, std::sqrt(static_cast<double>(n) * audit.energy_before));
          a.max_momentum_rel = std::max(a.max_momentum_rel, dp / pscale);
          if (audit.energy_before > 0.0)
            a.max_energy_rel = std::max(a.max_energy_rel,
                                        std::abs(audit.energy_after - audit.energy_before) / audit.energy_before);
        }
      }
    });
    if (averaging) rho_acc.add(rho_now);
    if (audit_step) ++res.conservation.audited_steps;

    if (log != nullptr && (step % cfg.output_every == 0 || step == total)) {
      const double el = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
      std::size_t fb = 0;
      for (auto f : fallback_w) fb += f;
      *log << "step " << step << "/" << total << " particles " << p.size() << " fallback_cell_steps " << fb
           << " elapsed_s " << std::fixed << std::setprecision(1) << el << std::defaultfloat << std::endl;
    }
  }

  for (const auto& a : audit_w) {
    res.conservation.audited_cells += a.audited_cells;
    res.conservation.max_momentum_rel = std::max(res.conservation.max_momentum_rel, a.max_momentum_rel);
    res.conservation.max_energy_rel = std::max(res.conservation.max_energy_rel, a.max_energy_rel);
  }
  for (auto f : fallback_w) res.fallback_cell_steps += f;
  for (auto f : closed_w) res.closed_cell_steps += f;
  res.final_particles = p.size();

  const double c_ref = std::sqrt(2.0 * theta_inf);
  res.field.resize(nc);
  for (std::size_t c = 0; c < nc; ++c) {
    const int ix = static_cast<int>(c % static_cast<std::size_t>(grid.nx));
    const int iy = static_cast<int>(c / static_cast<std::size_t>(grid.nx));
    FieldPoint& f = res.field[c];
    f.x1 = grid.cell_center_x(ix) / L;
    f.x2 = grid.cell_center_y(iy) / L;
    const CellSums& s = sums[c];
    f.n_samples = static_cast<std::size_t>(s.n);
    f.rho = rho_acc.mean()[c] / n_inf;
    if (s.n >= 2.0) {
      const double ux = s.sx / s.n, uy = s.sy / s.n, uz = s.sz / s.n;
      const double theta = std::max((s.s2 / s.n - ux * ux - uy * uy - uz * uz) / 3.0, 0.0);
      f.ux = ux / c_ref;
      f.uy = uy / c_ref;
      f.T = theta / theta_inf;
      f.Ma = theta > 0.0 ? std::sqrt(ux * ux + uy * uy) / std::sqrt(kGamma * theta) : 0.0;
    }
  }

  // slice: linear interpolation between the two cell rows around slice_y
  const double yq = cfg.slice_y * L / grid.dy() - 0.5;
  const int iy0 = std::clamp(static_cast<int>(std::floor(yq)), 0, grid.ny - 2);
  const double fy = std::clamp(yq - iy0, 0.0, 1.0);
  res.slice.resize(static_cast<std::size_t>(grid.nx));
  std::vector<double> xs, Ts;
  for (int ix = 0; ix < grid.nx; ++ix) {
    const FieldPoint& a = res.field[static_cast<std::size_t>(iy0 * grid.nx + ix)];
    const FieldPoint& b = res.field[static_cast<std::size_t>((iy0 + 1) * grid.nx + ix)];
    FieldPoint& s = res.slice[static_cast<std::size_t>(ix)];
    s.x1 = a.x1;
    s.x2 = cfg.slice_y;
    s.rho = (1 - fy) * a.rho + fy * b.rho;
    s.ux = (1 - fy) * a.ux + fy * b.ux;
    s.uy = (1 - fy) * a.uy + fy * b.uy;
    s.T = (1 - fy) * a.T + fy * b.T;
    s.Ma = (1 - fy) * a.Ma + fy * b.Ma;
    s.n_samples = std::min(a.n_samples, b.n_samples);
    xs.push_back(s.x1);
    Ts.push_back(s.T);
  }
  try {
    res.metrics = shock_metrics(xs, Ts);
  } catch (const UndefinedMetricError&) {
    res.metrics.reset();
  }
  return res;
}

void write_field_csv(std::ostream& os, const std::vector<FieldPoint>& points) {
  os << kFieldHeader << '\n' << std::setprecision(10);
  for (const auto& f : points)
    os << f.x1 << ',' << f.x2 << ',' << f.rho << ',' << f.ux << ',' << f.uy << ',' << f.T << ',' << f.Ma << ','
       << f.n_samples << '\n';
}

void write_plot_script(std::ostream& os, Scenario scenario) {
  os << "import os\nimport pandas as pd\nimport matplotlib\nmatplotlib.use('Agg')\nimport matplotlib.pyplot as plt\n\n"
        "here = os.path.dirname(os.path.abspath(__file__))\n";
  if (scenario == Scenario::kHomogeneous) {
    os << "d = pd.read_csv(os.path.join(here, 'homogeneous.csv'))\n"
          "fig, ax = plt.subplots(1, 3, figsize=(13, 4))\n"
          "for c in ['sxx', 'syy', 'szz', 'sxy']:\n    ax[0].plot(d.t, d[c], label=c)\n"
          "for c in ['qx', 'qy', 'qz']:\n    ax[1].plot(d.t, d[c], label=c)\n"
          "ax[2].plot(d.t, d.H, label='H')\n"
          "for a in ax:\n    a.set_xlabel('t / tau_ref')\n    a.legend()\n"
          "fig.tight_layout()\nfig.savefig(os.path.join(here, 'homogeneous.png'), dpi=120)\n";
  } else {
    os << "f = pd.read_csv(os.path.join(here, 'field.csv'))\n"
          "s = pd.read_csv(os.path.join(here, 'slice.csv'))\n"
          "nx = f.x1.nunique(); ny = f.x2.nunique()\n"
          "fig, ax = plt.subplots(1, 2, figsize=(12, 5))\n"
          "ma = f.Ma.values.reshape(ny, nx)\n"
          "im = ax[0].imshow(ma, origin='lower', extent=[f.x1.min(), f.x1.max(), f.x2.min(), f.x2.max()], aspect='auto')\n"
          "fig.colorbar(im, ax=ax[0], label='Ma')\n"
          "ax[0].set_xlabel('x1 / L_ref'); ax[0].set_ylabel('x2 / L_ref')\n"
          "ax[1].plot(s.x1, s['T'])\nax[1].set_xlabel('x1 / L_ref'); ax[1].set_ylabel('T / T_inf')\n"
          "fig.tight_layout()\nfig.savefig(os.path.join(here, 'shock.png'), dpi=120)\n";
  }
}

}  // namespace fefp
