#include "fefp/kinetics.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "fefp/error.hpp"
#include "fefp/rng.hpp"

namespace fefp {

GasModel GasModel::maxwell() {
  GasModel g;
  g.omega = 1.0;
  g.interaction = Interaction::kMaxwell;
  return g;
}

GasModel GasModel::hard_sphere() {
  GasModel g;
  g.omega = 0.5;
  g.interaction = Interaction::kHardSphereApprox;
  return g;
}

void GasModel::validate() const {
  if (!(mu0 > 0.0) || !(T0 > 0.0) || !(molecular_mass > 0.0) || !(kB > 0.0))
    throw std::invalid_argument("GasModel: mu0, T0, mass and kB must be positive");
  if (omega < 0.5 || omega > 1.0)
    throw std::invalid_argument("GasModel: omega must lie in [0.5, 1]");
  if (interaction == Interaction::kHardSphereApprox && omega != 0.5)
    throw std::invalid_argument("GasModel: hard-sphere interaction requires omega = 0.5");
}

double GasModel::viscosity(double theta) const {
  const double T = molecular_mass * theta / kB;
  return mu0 * std::pow(T / T0, omega);
}

TransportScales transport_scales(double theta, double rho, const GasModel& model) {
  if (!(theta > 0.0) || !(rho > 0.0))
    throw DegenerateCellError("transport_scales: theta and rho must be positive");
  TransportScales s;
  s.p = rho * theta;
  s.mu = model.viscosity(theta);
  s.tau = 2.0 * s.mu / s.p;
  return s;
}

double mean_free_path(double rho, double theta, const GasModel& model) {
  // VHS: lambda = 2 (7 - 2w)(5 - 2w) / (15 sqrt(2 pi)) * mu / (rho sqrt(theta)); w = 1/2 gives 16/5.
  const double w = model.omega;
  const double factor = 2.0 * (7.0 - 2.0 * w) * (5.0 - 2.0 * w) / (15.0 * std::sqrt(2.0 * std::numbers::pi));
  return factor * model.viscosity(theta) / (rho * std::sqrt(theta));
}

void ParticleArrays::reserve(std::size_t n) {
  x.reserve(n);
  y.reserve(n);
  vx.reserve(n);
  vy.reserve(n);
  vz.reserve(n);
  id.reserve(n);
}

void ParticleArrays::resize(std::size_t n) {
  x.resize(n);
  y.resize(n);
  vx.resize(n);
  vy.resize(n);
  vz.resize(n);
  id.resize(n);
}

void ParticleArrays::push_back(double px, double py, const Vec3& v, std::uint64_t pid) {
  x.push_back(px);
  y.push_back(py);
  vx.push_back(v[0]);
  vy.push_back(v[1]);
  vz.push_back(v[2]);
  id.push_back(pid);
}

void ParticleArrays::compact(std::span<const std::uint8_t> keep) {
  std::size_t out = 0;
  for (std::size_t i = 0; i < size(); ++i) {
    if (!keep[i]) continue;
    x[out] = x[i];
    y[out] = y[i];
    vx[out] = vx[i];
    vy[out] = vy[i];
    vz[out] = vz[i];
    id[out] = id[i];
    ++out;
  }
  resize(out);
}

namespace {
template <class T>
void apply_perm(std::vector<T>& v, std::span<const std::uint32_t> perm, std::vector<T>& scratch) {
  scratch.resize(perm.size());
  for (std::size_t k = 0; k < perm.size(); ++k) scratch[k] = v[perm[k]];
  v.swap(scratch);
}
}  // namespace

void ParticleArrays::permute(std::span<const std::uint32_t> perm) {
  std::vector<double> scratch;
  apply_perm(x, perm, scratch);
  apply_perm(y, perm, scratch);
  apply_perm(vx, perm, scratch);
  apply_perm(vy, perm, scratch);
  apply_perm(vz, perm, scratch);
  std::vector<std::uint64_t> ids;
  apply_perm(id, perm, ids);
}

void sample_maxwellian(const Vec3& U, double theta, std::uint64_t seed, std::span<double> vx,
                       std::span<double> vy, std::span<double> vz) {
  if (!(theta > 0.0)) throw std::invalid_argument("sample_maxwellian: theta must be positive");
  if (vx.empty() || vy.size() != vx.size() || vz.size() != vx.size())
    throw std::invalid_argument("sample_maxwellian: need count >= 1 and equal-length outputs");
  const double sd = std::sqrt(theta);
  for (std::size_t i = 0; i < vx.size(); ++i) {
    CounterRng rng(seed, 0, i, StreamTag::kInitialVelocity);
    vx[i] = U[0] + sd * rng.normal();
    vy[i] = U[1] + sd * rng.normal();
    vz[i] = U[2] + sd * rng.normal();
  }
}

}  // namespace fefp
