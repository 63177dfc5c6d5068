#include "config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>

#include "dnilab/engines.hpp"
#include "dnilab/ou_noise.hpp"

namespace dnilab::cli {

namespace {

std::vector<std::string> split_key(const std::string& dotted) {
  std::vector<std::string> parts;
  std::size_t begin = 0;
  while (true) {
    const auto dot = dotted.find('.', begin);
    parts.push_back(dotted.substr(begin, dot - begin));
    if (dot == std::string::npos) break;
    begin = dot + 1;
  }
  for (const auto& p : parts) {
    if (p.empty()) throw UsageError("malformed key '" + dotted + "'");
  }
  return parts;
}

AxisConfig parse_axis(const Json& j, const std::string& name, bool allow_dni) {
  AxisConfig a;
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "x") a.direction = meas::kXAxis;
    else if (s == "y") a.direction = meas::kYAxis;
    else if (s == "z") a.direction = meas::kZAxis;
    else if (s == "dni" && allow_dni) a.dni = true;
    else throw UsageError("scheme." + name + ": expected x, y, z" + (allow_dni ? ", dni" : "") +
                          " or {theta, phi}");
    return a;
  }
  if (!j.is_object() || !j.contains("theta") || !j.contains("phi")) {
    throw UsageError("scheme." + name + ": expected an axis name or {theta, phi}");
  }
  try {
    a.direction = meas::BlochDirection::make(j.at("theta").get<double>(), j.at("phi").get<double>());
  } catch (const std::invalid_argument& e) {
    throw UsageError("scheme." + name + ": " + e.what());
  }
  return a;
}

TimeGrid parse_grid(const Json& j, const std::string& name) {
  TimeGrid g;
  g.start = j.at("start").get<double>();
  g.stop = j.at("stop").get<double>();
  g.steps = j.at("steps").get<std::size_t>();
  if (!std::isfinite(g.start) || !std::isfinite(g.stop) || g.start < 0.0 || g.stop < g.start) {
    throw UsageError(name + ": need 0 <= start <= stop");
  }
  if (g.steps < 2) throw UsageError(name + ".steps must be at least 2");
  return g;
}

}  // namespace

std::vector<double> TimeGrid::values() const {
  std::vector<double> v(steps);
  for (std::size_t i = 0; i < steps; ++i) {
    v[i] = start + (stop - start) * static_cast<double>(i) / static_cast<double>(steps - 1);
  }
  v.back() = stop;
  return v;
}

Json default_config() {
  return Json::parse(R"({
    "model": {"kind": "markov_dephasing", "gamma": 1.0, "tau_c": 1.0, "g": 1.0, "chi": 0.0, "n": 1},
    "scheme": {"x": "x", "y": "x", "z": "x", "initial_bloch": [0.0, 0.0, 0.0]},
    "time": {"t": {"start": 0.0, "stop": 3.0, "steps": 31}, "tau": "t"},
    "mc_samples": 100000,
    "seed": 0,
    "threads": 0,
    "tol": 1e-9,
    "out": "",
    "scan": null
  })");
}

void merge_into(Json& base, const Json& patch) {
  if (!patch.is_object() || !base.is_object()) {
    base = patch;
    return;
  }
  for (auto it = patch.begin(); it != patch.end(); ++it) {
    if (base.contains(it.key()) && base[it.key()].is_object() && it.value().is_object()) {
      merge_into(base[it.key()], it.value());
    } else {
      base[it.key()] = it.value();
    }
  }
}

void apply_override(Json& doc, const std::string& dotted_key, const std::string& value) {
  const auto parts = split_key(dotted_key);
  Json* node = &doc;
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    if (!node->is_object() || !node->contains(parts[i])) {
      throw UsageError("unknown config key '" + dotted_key + "'");
    }
    node = &(*node)[parts[i]];
    if (node->is_null()) *node = Json::object();
  }
  if (!node->is_object()) {
    throw UsageError("config key '" + dotted_key + "' is not inside a section");
  }
  const bool known = node->contains(parts.back());
  // scan.* and axis {theta, phi} objects may be created by flags
  const bool creatable = parts.front() == "scan" || parts.back() == "theta" || parts.back() == "phi";
  if (!known && !creatable) throw UsageError("unknown config key '" + dotted_key + "'");
  Json parsed = Json::parse(value, nullptr, false);
  (*node)[parts.back()] = parsed.is_discarded() ? Json(value) : parsed;
}

Json load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot open config file " + path);
  Json file = Json::parse(in, nullptr, false, true);
  if (file.is_discarded() || !file.is_object()) {
    throw UsageError("config file " + path + " is not a JSON object");
  }
  Json doc = default_config();
  merge_into(doc, file);
  return doc;
}

SweepConfig parse_config(const Json& doc) {
  SweepConfig c;
  c.effective = doc;
  try {
    const auto& m = doc.at("model");
    c.model.kind = m.at("kind").get<std::string>();
    c.model.gamma = m.at("gamma").get<double>();
    c.model.tau_c = m.at("tau_c").get<double>();
    c.model.g = m.at("g").get<double>();
    c.model.chi = m.at("chi").get<double>();
    c.model.n = m.at("n").get<std::size_t>();

    const auto& s = doc.at("scheme");
    c.x = parse_axis(s.at("x"), "x", false);
    c.y = parse_axis(s.at("y"), "y", true);
    c.z = parse_axis(s.at("z"), "z", false);
    const auto bloch = s.at("initial_bloch").get<std::vector<double>>();
    if (bloch.size() != 3) throw UsageError("scheme.initial_bloch needs three components");
    std::copy(bloch.begin(), bloch.end(), c.initial_bloch.begin());
    if (std::hypot(bloch[0], bloch[1], bloch[2]) > 1.0 + 1e-12) {
      throw UsageError("scheme.initial_bloch lies outside the Bloch ball");
    }

    const auto& time = doc.at("time");
    c.t = parse_grid(time.at("t"), "time.t");
    const auto& tau = time.at("tau");
    if (tau.is_string()) {
      if (tau.get<std::string>() != "t") throw UsageError("time.tau must be \"t\" or a grid");
    } else {
      c.tau = parse_grid(tau, "time.tau");
    }

    const auto samples = doc.at("mc_samples").get<std::int64_t>();
    if (samples < 2) throw UsageError("mc_samples must be at least 2");
    c.mc_samples = static_cast<std::size_t>(samples);
    c.seed = doc.at("seed").get<std::uint64_t>();
    const auto threads = doc.at("threads").get<std::int64_t>();
    if (threads < 0) throw UsageError("threads must be nonnegative");
    c.threads = static_cast<unsigned>(threads);
    c.tol = doc.at("tol").get<double>();
    if (!(c.tol > 0.0)) throw UsageError("tol must be positive");
    c.out = doc.at("out").get<std::string>();

    const auto& scan = doc.at("scan");
    if (!scan.is_null()) {
      ScanConfig sc;
      sc.param = scan.at("param").get<std::string>();
      sc.lo = scan.at("lo").get<double>();
      sc.hi = scan.at("hi").get<double>();
      sc.iterations = scan.value("iterations", std::size_t{60});
      if (scan.contains("n")) sc.n = scan.at("n").get<std::size_t>();
      if (!(sc.hi > sc.lo)) throw UsageError("scan: need lo < hi");
      if (sc.param != "chi" && sc.param != "g" && sc.param != "gamma" && sc.param != "tau_c") {
        throw UsageError("scan.param must be one of chi, g, gamma, tau_c");
      }
      c.scan = sc;
    }
  } catch (const Json::exception& e) {
    throw UsageError(std::string("config: ") + e.what());
  }
  if (c.model.kind == "ou_monte_carlo" && c.mc_samples < 1000) {
    throw UsageError("mc_samples must be at least 1000 for the Monte Carlo engine");
  }
  // builds once to surface parameter errors as usage errors
  make_engine(c.model, std::max<std::size_t>(c.mc_samples, 2), c.seed, 1);
  return c;
}

std::string config_hash(const Json& doc) {
  Json canonical = doc;
  canonical.erase("threads");
  canonical.erase("out");
  const std::string text = canonical.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

models::ModelSpec model_spec(const ModelConfig& m) {
  const auto& k = m.kind;
  if (k == "ou_gaussian" || k == "ou_monte_carlo") return models::OUNoiseParams{m.gamma, m.tau_c};
  if (k == "spin_bath" || k == "spin_bath_dense") return models::SpinBathParams{m.g, m.n};
  if (k == "dissipative" || k == "dissipative_dense") {
    return models::DissipativeParams{m.gamma, m.chi, m.n};
  }
  if (k == "markov_dephasing") return models::MarkovDephasingParams{m.gamma};
  throw UsageError("model.kind '" + k +
                   "' unknown (ou_gaussian, ou_monte_carlo, spin_bath, spin_bath_dense, "
                   "dissipative, dissipative_dense, markov_dephasing)");
}

std::unique_ptr<models::EvolutionEngine> make_engine(const ModelConfig& m, std::size_t mc_samples,
                                                     std::uint64_t seed, unsigned threads) {
  using namespace models;
  const auto spec = model_spec(m);
  try {
    if (m.kind == "ou_gaussian") return std::make_unique<OUGaussianEngine>(std::get<OUNoiseParams>(spec));
    if (m.kind == "ou_monte_carlo") {
      return std::make_unique<OUMonteCarloEngine>(std::get<OUNoiseParams>(spec), mc_samples, seed,
                                                  threads);
    }
    if (m.kind == "spin_bath") return std::make_unique<SpinBathEngine>(std::get<SpinBathParams>(spec));
    if (m.kind == "spin_bath_dense") {
      return std::make_unique<SpinBathEngine>(std::get<SpinBathParams>(spec), SpinBathPath::dense);
    }
    if (m.kind == "dissipative") {
      return std::make_unique<DissipativeEngine>(std::get<DissipativeParams>(spec));
    }
    if (m.kind == "dissipative_dense") {
      return std::make_unique<DissipativeEngine>(std::get<DissipativeParams>(spec),
                                                 DissipativePath::dense);
    }
    return std::make_unique<MarkovDephasingEngine>(std::get<MarkovDephasingParams>(spec));
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("model: ") + e.what());
  }
}

qmath::ComplexMatrix initial_state(const SweepConfig& c) {
  const auto& b = c.initial_bloch;
  return 0.5 * (qmath::identity(2) + b[0] * qmath::pauli_x() + b[1] * qmath::pauli_y() +
                b[2] * qmath::pauli_z());
}

}  // namespace dnilab::cli
