#pragma once

// Sweep configuration: a JSON document merged over built-in defaults, then
// patched by `--section.key=value` flags.

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "dnilab/engine.hpp"
#include "dnilab/measurement.hpp"
#include "dnilab/model_params.hpp"

namespace dnilab::cli {

using Json = nlohmann::json;

/// Bad config or flags; maps to exit code 1.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ModelConfig {
  std::string kind = "markov_dephasing";
  double gamma = 1.0;
  double tau_c = 1.0;
  double g = 1.0;
  double chi = 0.0;
  std::size_t n = 1;
};

struct AxisConfig {
  bool dni = false;
  meas::BlochDirection direction = meas::kXAxis;
};

struct TimeGrid {
  double start = 0.0;
  double stop = 1.0;
  std::size_t steps = 2;
  std::vector<double> values() const;
};

struct ScanConfig {
  std::string param;
  double lo = 0.0;
  double hi = 1.0;
  std::size_t iterations = 60;
  /// Model size used by the scan only; empty means model.n.
  std::optional<std::size_t> n;
};

struct SweepConfig {
  Json effective;  ///< merged document, echoed in outputs
  ModelConfig model;
  AxisConfig x;
  AxisConfig y;
  AxisConfig z;
  std::array<double, 3> initial_bloch{0.0, 0.0, 0.0};
  TimeGrid t;
  std::optional<TimeGrid> tau;  ///< empty: tau = t
  std::size_t mc_samples = 100000;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  double tol = 1e-9;
  std::string out;
  std::optional<ScanConfig> scan;
};

Json default_config();

/// Sets the dotted key ("model.g") to `value`, parsed as JSON when possible
/// and as a string otherwise. Unknown keys are a UsageError.
void apply_override(Json& doc, const std::string& dotted_key, const std::string& value);

/// Recursively overlays `patch` on `base`.
void merge_into(Json& base, const Json& patch);

/// Validates and converts the merged document.
SweepConfig parse_config(const Json& doc);

/// Reads a config file and merges it over the defaults.
Json load_config_file(const std::string& path);

/// FNV-1a of the canonical dump, excluding keys that cannot change results
/// (threads, out).
std::string config_hash(const Json& doc);

std::unique_ptr<models::EvolutionEngine> make_engine(const ModelConfig& model,
                                                     std::size_t mc_samples, std::uint64_t seed,
                                                     unsigned threads);

models::ModelSpec model_spec(const ModelConfig& model);

qmath::ComplexMatrix initial_state(const SweepConfig& config);

}  // namespace dnilab::cli
