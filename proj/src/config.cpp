#include "spinsync/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "spinsync/spectral.hpp"

namespace spinsync {

using nlohmann::json;

ComplexMatrix InitialStateSpec::realize(int n_spins) const {
  if (kind == Kind::DensityMatrix) {
    validate_density_matrix(density);
    if (density.rows() != (Eigen::Index{1} << n_spins))
      throw std::invalid_argument(
          "initial_state.density: dimension does not match 2^n_spins");
    return density;
  }
  return pure_density(realize_pure(n_spins));
}

StateVector InitialStateSpec::realize_pure(int n_spins) const {
  switch (kind) {
    case Kind::Default:
      return default_initial_state(n_spins);
    case Kind::Product:
      if (static_cast<int>(theta.size()) != n_spins)
        throw std::invalid_argument(
            "initial_state.theta: needs one angle per spin");
      if (static_cast<int>(phi.size()) != n_spins)
        throw std::invalid_argument("initial_state.phi: needs one angle per spin");
      return product_state(theta, phi);
    case Kind::DensityMatrix:
      throw std::invalid_argument(
          "initial_state: a density matrix cannot seed pure-state trajectories; "
          "use a product state");
  }
  throw std::logic_error("unreachable");
}

void ExperimentConfig::validate() const {
  model.validate();
  auto fail = [](const std::string& field, const std::string& why) {
    throw std::invalid_argument(field + ": " + why);
  };
  if (!(dt > 0.0)) fail("dt", "must be > 0");
  if (!(t_final > 0.0)) fail("t_final", "must be > 0");
  if (record_stride < 1) fail("record_stride", "must be >= 1");
  if (n_traj < 1) fail("n_traj", "must be >= 1");
  if (snapshot_stride < 0) fail("snapshot_stride", "must be >= 0");
  if (n_threads < 0) fail("n_threads", "must be >= 0");
  if (!(fft.transient_cut >= 0.0)) fail("fft.transient_cut", "must be >= 0");
  if (sync.site_j < 1 || sync.site_j > model.n_spins)
    fail("sync.site_j", "site out of range");
  if (sync.site_l < 1 || sync.site_l > model.n_spins)
    fail("sync.site_l", "site out of range");
  if (lyapunov.delta < 0.0 || lyapunov.delta >= 1.0)
    fail("lyapunov.delta", "must be in [0, 1)");
  if (!(lyapunov.delta_max > 0.0)) fail("lyapunov.delta_max", "must be > 0");
  if (!(lyapunov.t_final > 0.0)) fail("lyapunov.t_final", "must be > 0");
  if (initial_state.kind == InitialStateSpec::Kind::Product) {
    if (static_cast<int>(initial_state.theta.size()) != model.n_spins)
      fail("initial_state.theta", "needs one angle per spin");
    if (static_cast<int>(initial_state.phi.size()) != model.n_spins)
      fail("initial_state.phi", "needs one angle per spin");
  }
}

namespace {

json complex_to_json(const Complex& z) { return json::array({z.real(), z.imag()}); }

Complex complex_from_json(const json& j) {
  return Complex{j.at(0).get<double>(), j.at(1).get<double>()};
}

std::string topology_name(Topology t) { return t == Topology::Ring ? "ring" : "chain"; }

Topology topology_from(const std::string& s) {
  if (s == "ring") return Topology::Ring;
  if (s == "chain") return Topology::Chain;
  throw std::invalid_argument("model.topology: expected 'ring' or 'chain', got '" + s + "'");
}

json model_to_json(const ModelSpec& m) {
  json dissipators = json::array();
  for (const auto& d : m.dissipators) {
    json weights = json::array();
    for (const auto& w : d.weights) weights.push_back(complex_to_json(w));
    dissipators.push_back(
        {{"sites", d.sites}, {"weights", weights}, {"rate", d.rate}});
  }
  return {{"n_spins", m.n_spins}, {"jx", m.jx},       {"jy", m.jy},
          {"jz", m.jz},           {"gamma", m.gamma}, {"topology", topology_name(m.topology)},
          {"dissipators", dissipators}};
}

ModelSpec model_from_json(const json& j) {
  ModelSpec m;
  m.n_spins = j.at("n_spins").get<int>();
  m.jx = j.at("jx").get<double>();
  m.jy = j.at("jy").get<double>();
  m.jz = j.at("jz").get<double>();
  m.gamma = j.at("gamma").get<double>();
  m.topology = topology_from(j.at("topology").get<std::string>());
  m.dissipators.clear();
  for (const auto& dj : j.at("dissipators")) {
    DissipatorSpec d;
    d.sites = dj.at("sites").get<std::vector<int>>();
    for (const auto& wj : dj.at("weights")) d.weights.push_back(complex_from_json(wj));
    d.rate = dj.at("rate").get<double>();
    m.dissipators.push_back(std::move(d));
  }
  return m;
}

json initial_state_to_json(const InitialStateSpec& s) {
  switch (s.kind) {
    case InitialStateSpec::Kind::Default:
      return {{"type", "default"}};
    case InitialStateSpec::Kind::Product:
      return {{"type", "product"}, {"theta", s.theta}, {"phi", s.phi}};
    case InitialStateSpec::Kind::DensityMatrix: {
      json rows = json::array();
      for (Eigen::Index r = 0; r < s.density.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < s.density.cols(); ++c)
          row.push_back(complex_to_json(s.density(r, c)));
        rows.push_back(row);
      }
      return {{"type", "density_matrix"}, {"entries", rows}};
    }
  }
  throw std::logic_error("unreachable");
}

InitialStateSpec initial_state_from_json(const json& j) {
  InitialStateSpec s;
  const std::string type = j.at("type").get<std::string>();
  if (type == "default") {
    s.kind = InitialStateSpec::Kind::Default;
  } else if (type == "product") {
    s.kind = InitialStateSpec::Kind::Product;
    s.theta = j.at("theta").get<std::vector<double>>();
    s.phi = j.at("phi").get<std::vector<double>>();
  } else if (type == "density_matrix") {
    s.kind = InitialStateSpec::Kind::DensityMatrix;
    const auto& rows = j.at("entries");
    const auto n = static_cast<Eigen::Index>(rows.size());
    s.density.resize(n, n);
    for (Eigen::Index r = 0; r < n; ++r)
      for (Eigen::Index c = 0; c < n; ++c)
        s.density(r, c) = complex_from_json(rows.at(r).at(c));
  } else {
    throw std::invalid_argument("initial_state.type: unknown type '" + type + "'");
  }
  return s;
}

}  // namespace

std::string to_json(const ExperimentConfig& c) {
  json j{{"model", model_to_json(c.model)},
         {"initial_state", initial_state_to_json(c.initial_state)},
         {"t_final", c.t_final},
         {"dt", c.dt},
         {"integrator", c.integrator == MasterIntegrator::Rk4 ? "rk4" : "expm"},
         {"record_stride", c.record_stride},
         {"n_traj", c.n_traj},
         {"master_seed", c.master_seed},
         {"snapshot_stride", c.snapshot_stride},
         {"snapshot_t_min", c.snapshot_t_min},
         {"scheme", c.scheme == SseScheme::ExponentialEuler ? "exponential_euler"
                                                            : "euler"},
         {"n_threads", c.n_threads},
         {"fft",
          {{"transient_cut", c.fft.transient_cut},
           {"window", c.fft.window == FftWindow::Hann ? "hann" : "rectangular"}}},
         {"sync",
          {{"site_j", c.sync.site_j},
           {"site_l", c.sync.site_l},
           {"window", json::array({c.sync.window_start, c.sync.window_end})}}},
         {"lyapunov",
          {{"delta", c.lyapunov.delta},
           {"delta_max", c.lyapunov.delta_max},
           {"t_final", c.lyapunov.t_final},
           {"seed", c.lyapunov.seed}}},
         {"output_dir", c.output_dir}};
  return j.dump(2);
}

ExperimentConfig config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config: invalid JSON: ") + e.what());
  }
  ExperimentConfig c;
  try {
    if (j.contains("model")) c.model = model_from_json(j.at("model"));
    if (j.contains("initial_state"))
      c.initial_state = initial_state_from_json(j.at("initial_state"));
    if (j.contains("t_final")) c.t_final = j.at("t_final").get<double>();
    if (j.contains("dt")) c.dt = j.at("dt").get<double>();
    if (j.contains("integrator")) {
      const std::string s = j.at("integrator").get<std::string>();
      if (s == "rk4") c.integrator = MasterIntegrator::Rk4;
      else if (s == "expm") c.integrator = MasterIntegrator::Expm;
      else throw std::invalid_argument("integrator: expected 'rk4' or 'expm'");
    }
    if (j.contains("record_stride")) c.record_stride = j.at("record_stride").get<int>();
    if (j.contains("n_traj")) c.n_traj = j.at("n_traj").get<int>();
    if (j.contains("master_seed")) c.master_seed = j.at("master_seed").get<std::uint64_t>();
    if (j.contains("snapshot_stride"))
      c.snapshot_stride = j.at("snapshot_stride").get<int>();
    if (j.contains("snapshot_t_min"))
      c.snapshot_t_min = j.at("snapshot_t_min").get<double>();
    if (j.contains("scheme")) {
      const std::string s = j.at("scheme").get<std::string>();
      if (s == "exponential_euler") c.scheme = SseScheme::ExponentialEuler;
      else if (s == "euler") c.scheme = SseScheme::Euler;
      else throw std::invalid_argument("scheme: expected 'exponential_euler' or 'euler'");
    }
    if (j.contains("n_threads")) c.n_threads = j.at("n_threads").get<int>();
    if (j.contains("fft")) {
      const auto& f = j.at("fft");
      if (f.contains("transient_cut"))
        c.fft.transient_cut = f.at("transient_cut").get<double>();
      if (f.contains("window")) {
        const std::string w = f.at("window").get<std::string>();
        if (w == "hann") c.fft.window = FftWindow::Hann;
        else if (w == "rectangular") c.fft.window = FftWindow::Rectangular;
        else throw std::invalid_argument("fft.window: expected 'rectangular' or 'hann'");
      }
    }
    if (j.contains("sync")) {
      const auto& s = j.at("sync");
      if (s.contains("site_j")) c.sync.site_j = s.at("site_j").get<int>();
      if (s.contains("site_l")) c.sync.site_l = s.at("site_l").get<int>();
      if (s.contains("window")) {
        c.sync.window_start = s.at("window").at(0).get<double>();
        c.sync.window_end = s.at("window").at(1).get<double>();
      }
    }
    if (j.contains("lyapunov")) {
      const auto& l = j.at("lyapunov");
      if (l.contains("delta")) c.lyapunov.delta = l.at("delta").get<double>();
      if (l.contains("delta_max")) c.lyapunov.delta_max = l.at("delta_max").get<double>();
      if (l.contains("t_final")) c.lyapunov.t_final = l.at("t_final").get<double>();
      if (l.contains("seed")) c.lyapunov.seed = l.at("seed").get<std::uint64_t>();
    }
    if (j.contains("output_dir")) c.output_dir = j.at("output_dir").get<std::string>();
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot read '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return config_from_json(buf.str());
}

void save_config(const ExperimentConfig& config, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("config: cannot write '" + path + "'");
  out << to_json(config) << "\n";
}

std::string config_hash(const ExperimentConfig& config) {
  // nlohmann::json keeps object keys sorted, so dump() is canonical.
  const std::string canonical = json::parse(to_json(config)).dump();
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char ch : canonical) {
    h ^= ch;
    h *= 0x100000001B3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

}  // namespace spinsync
