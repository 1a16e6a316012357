#include "fefp/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <ostream>
#include <set>
#include <sstream>

#include "fefp/error.hpp"

namespace fefp {

namespace {

namespace pt = boost::property_tree;

constexpr double kBoltzmannSI = 1.380649e-23;

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"run", {"scenario", "model", "seed", "threads", "output_dir", "output_every", "n_particles", "dt", "units"}},
      {"gas", {"interaction", "omega", "molecular_mass", "mu0", "T0"}},
      {"closure", {"eps0", "min_particles", "max_condition"}},
      {"homogeneous", {"initial", "lambda", "shift", "var_plus", "var_minus", "steps"}},
      {"shock",
       {"Ma", "Kn", "nx", "ny", "Lx", "Ly", "plate_length", "wall_theta", "wall_temperature", "slice_x2",
        "steps_transient", "steps_average", "audit_every", "L_ref"}},
      {"freestream", {"n", "T"}},
  };
  return keys;
}

class Reader {
 public:
  explicit Reader(const pt::ptree& tree) : tree_(tree) {}

  bool has(const std::string& key) const { return tree_.get_optional<std::string>(key).has_value(); }

  std::string str(const std::string& key, const std::string& fallback) const {
    return tree_.get<std::string>(key, fallback);
  }

  template <class T>
  T num(const std::string& key, T fallback) const {
    const auto raw = tree_.get_optional<std::string>(key);
    if (!raw) return fallback;
    std::istringstream is(*raw);
    T value{};
    is >> value;
    if (is.fail() || !(is >> std::ws).eof()) throw ConfigError("bad numeric value for " + key + ": '" + *raw + "'");
    return value;
  }

  double required(const std::string& key) const {
    if (!has(key)) throw ConfigError("missing required key " + key);
    return num<double>(key, 0.0);
  }

 private:
  const pt::ptree& tree_;
};

Vec3 parse_triplet(const std::string& key, const std::string& raw) {
  std::string s = raw;
  for (char& c : s)
    if (c == ',') c = ' ';
  std::istringstream is(s);
  Vec3 v{};
  is >> v[0] >> v[1] >> v[2];
  if (is.fail() || !(is >> std::ws).eof()) throw ConfigError("expected three numbers for " + key + ": '" + raw + "'");
  return v;
}

}  // namespace

void SimulationConfig::validate() const {
  if (!(dt > 0.0)) throw ConfigError("dt must be positive");
  if (n_particles < 1000) throw ConfigError("n_particles must be at least 1000");
  if (threads < 1) throw ConfigError("threads must be at least 1");
  if (output_every < 1) throw ConfigError("output_every must be at least 1");
  if (!(closure.eps0 >= 0.0)) throw ConfigError("eps0 must be non-negative");
  if (!(closure.max_condition > 1.0)) throw ConfigError("max_condition must exceed 1");
  try {
    gas.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (scenario == Scenario::kHomogeneous) {
    if (steps < 1) throw ConfigError("steps must be at least 1");
    if (initial == InitialState::kAnisotropic)
      for (double l : lambda)
        if (!(l > 0.0)) throw ConfigError("lambda entries must be positive");
    if (initial == InitialState::kBiGaussian && (!(var_plus > 0.0) || !(var_minus > 0.0)))
      throw ConfigError("bi-Gaussian variances must be positive");
  } else {
    if (!(Kn > 0.0)) throw ConfigError("Kn must be positive");
    if (!(Ma > 0.0)) throw ConfigError("Ma must be positive");
    if (nx < 2 || ny < 2) throw ConfigError("grid needs at least 2x2 cells");
    if (!(Lx > 0.0) || !(Ly > 0.0)) throw ConfigError("domain extents must be positive");
    if (!(plate_length > 0.0) || plate_length > Ly) throw ConfigError("plate_length must lie in (0, Ly]");
    if (!(wall_theta > 0.0)) throw ConfigError("wall temperature must be positive");
    if (!(slice_y > 0.0) || slice_y >= Ly) throw ConfigError("slice_x2 must lie inside the domain");
    if (nx % 2 != 0) throw ConfigError("nx must be even so the plate sits on a cell face");
    if (steps_transient < 0 || steps_average < 1) throw ConfigError("bad step counts");
    if (audit_every < 1) throw ConfigError("audit_every must be at least 1");
  }
}

SimulationConfig parse_config(std::istream& in) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config syntax: ") + e.what());
  }

  SimulationConfig cfg;
  for (const auto& [section, body] : tree) {
    const auto known = known_keys().find(section);
    if (known == known_keys().end()) throw ConfigError("unknown section [" + section + "]");
    if (body.empty() && !body.data().empty()) throw ConfigError("key outside a section: " + section);
    for (const auto& [key, value] : body) {
      if (!known->second.contains(key)) throw ConfigError("unknown key " + section + "." + key);
      cfg.echo.emplace_back(section + "." + key, value.data());
    }
  }

  const Reader r(tree);
  const std::string scenario = r.str("run.scenario", "homogeneous");
  if (scenario == "homogeneous") cfg.scenario = Scenario::kHomogeneous;
  else if (scenario == "shock") cfg.scenario = Scenario::kShockPlate;
  else throw ConfigError("run.scenario must be homogeneous or shock");

  const std::string model = r.str("run.model", "fefp");
  if (model == "fefp") cfg.model = closure::DriftModel::kFefp;
  else if (model == "cubic") cfg.model = closure::DriftModel::kCubic;
  else if (model == "linear") cfg.model = closure::DriftModel::kLinear;
  else throw ConfigError("run.model must be fefp, cubic or linear");

  cfg.seed = r.num<std::uint64_t>("run.seed", cfg.seed);
  cfg.threads = r.num<int>("run.threads", cfg.threads);
  cfg.output_dir = r.str("run.output_dir", cfg.output_dir);
  cfg.output_every = r.num<int>("run.output_every", cfg.output_every);
  cfg.n_particles = r.num<std::size_t>("run.n_particles", cfg.n_particles);

  const std::string interaction =
      r.str("gas.interaction", cfg.scenario == Scenario::kShockPlate ? "hard_sphere" : "maxwell");
  if (interaction == "maxwell") cfg.gas = GasModel::maxwell();
  else if (interaction == "hard_sphere") cfg.gas = GasModel::hard_sphere();
  else throw ConfigError("gas.interaction must be maxwell or hard_sphere");
  cfg.gas.omega = r.num<double>("gas.omega", cfg.gas.omega);

  cfg.closure.eps0 = r.num<double>("closure.eps0", cfg.closure.eps0);
  cfg.closure.min_particles = r.num<std::size_t>("closure.min_particles", cfg.closure.min_particles);
  cfg.closure.max_condition = r.num<double>("closure.max_condition", cfg.closure.max_condition);

  const std::string initial = r.str("homogeneous.initial", "anisotropic");
  if (initial == "maxwellian") cfg.initial = InitialState::kMaxwellian;
  else if (initial == "anisotropic") cfg.initial = InitialState::kAnisotropic;
  else if (initial == "bigaussian") cfg.initial = InitialState::kBiGaussian;
  else throw ConfigError("homogeneous.initial must be maxwellian, anisotropic or bigaussian");
  if (r.has("homogeneous.lambda")) cfg.lambda = parse_triplet("homogeneous.lambda", r.str("homogeneous.lambda", ""));
  cfg.shift = r.num<double>("homogeneous.shift", cfg.shift);
  cfg.var_plus = r.num<double>("homogeneous.var_plus", cfg.var_plus);
  cfg.var_minus = r.num<double>("homogeneous.var_minus", cfg.var_minus);
  cfg.steps = r.num<int>("homogeneous.steps", cfg.steps);

  cfg.Ma = r.num<double>("shock.Ma", cfg.Ma);
  cfg.Kn = r.num<double>("shock.Kn", cfg.Kn);
  cfg.nx = r.num<int>("shock.nx", cfg.nx);
  cfg.ny = r.num<int>("shock.ny", cfg.ny);
  cfg.Lx = r.num<double>("shock.Lx", cfg.Lx);
  cfg.Ly = r.num<double>("shock.Ly", cfg.Ly);
  cfg.plate_length = r.num<double>("shock.plate_length", cfg.plate_length);
  cfg.wall_theta = r.num<double>("shock.wall_theta", cfg.wall_theta);
  cfg.slice_y = r.num<double>("shock.slice_x2", cfg.slice_y);
  cfg.steps_transient = r.num<int>("shock.steps_transient", cfg.steps_transient);
  cfg.steps_average = r.num<int>("shock.steps_average", cfg.steps_average);
  cfg.audit_every = r.num<int>("shock.audit_every", cfg.audit_every);

  const std::string units = r.str("run.units", "nondimensional");
  if (units == "nondimensional") {
    cfg.dt = r.num<double>("run.dt", cfg.dt);
    for (const char* k : {"gas.molecular_mass", "gas.mu0", "gas.T0", "freestream.n", "freestream.T", "shock.L_ref",
                          "shock.wall_temperature"})
      if (r.has(k)) throw ConfigError(std::string(k) + " is only accepted with run.units = si");
  } else if (units == "si") {
    // reference state = free stream; dt in seconds, L_ref in metres, temperatures in kelvin
    const double mass = r.required("gas.molecular_mass");
    const double mu0 = r.required("gas.mu0");
    const double T0 = r.required("gas.T0");
    const double n = r.required("freestream.n");
    const double T = r.required("freestream.T");
    if (!(mass > 0.0) || !(mu0 > 0.0) || !(T0 > 0.0) || !(n > 0.0) || !(T > 0.0))
      throw ConfigError("SI gas and free-stream values must be positive");
    const double theta = kBoltzmannSI * T / mass;
    const double mu = mu0 * std::pow(T / T0, cfg.gas.omega);
    const double p = n * kBoltzmannSI * T;
    const double tau_ref = 2.0 * mu / p;
    cfg.dt = r.required("run.dt") / tau_ref;
    if (r.has("shock.L_ref")) {
      const double w = cfg.gas.omega;
      const double lambda = 2.0 * (7.0 - 2.0 * w) * (5.0 - 2.0 * w) / (15.0 * std::sqrt(2.0 * std::numbers::pi)) *
                            mu / (mass * n * std::sqrt(theta));
      cfg.Kn = 2.0 * lambda / r.required("shock.L_ref");
    }
    if (r.has("shock.wall_temperature")) cfg.wall_theta = r.required("shock.wall_temperature") / T;
  } else {
    throw ConfigError("run.units must be nondimensional or si");
  }

  cfg.validate();
  return cfg;
}

SimulationConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  return parse_config(in);
}

void write_config_echo(std::ostream& os, const SimulationConfig& cfg) {
  for (const auto& [k, v] : cfg.echo) os << k << " = " << v << '\n';
}

}  // namespace fefp
