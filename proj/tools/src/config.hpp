#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "curlgap/discrete_operator.hpp"
#include "curlgap/ground_state.hpp"
#include "curlgap/periodic_spectrum.hpp"
#include "curlgap/spectrum_set.hpp"

namespace curlgap::cli {

// Malformed or inconsistent configuration (exit code 1).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GammaSpec {
  enum class Kind { constant, power, table };
  Kind kind = Kind::constant;
  double value = 1.0;        // constant
  double coefficient = 1.0;  // power: coefficient (1 + |x|)^exponent
  double exponent = 0.0;
  std::vector<double> radii;   // table: piecewise linear in |x|, clamped at the ends
  std::vector<double> values;

  Sampler sampler() const;
};

struct PotentialSpec {
  enum class Kind { constant, designed };
  Kind kind = Kind::constant;
  double value = 1.0;
  // designed: re-ingest this potential file instead of designing from the config
  std::optional<std::filesystem::path> file;
};

struct RadialDesignSpec {
  std::optional<double> winf;  // absent: -nu1 + winf_margin
  double winf_margin = 1.0;
  double eta = 3.5;
  double mu0_fraction = 0.5;
};

struct CurvesSpec {
  double delta = 1.0;
  double w0 = 0.0;
  double winf = 20.0;
  std::size_t samples = 2000;
};

struct GridSpec {
  double r_max = 12.0;
  double z_half = 12.0;
  std::size_t nr = 64;
  std::size_t nz = 64;
};

struct ProblemSpec {
  double p = 3.0;
  Mode mode = Mode::focusing;
  GammaSpec gamma;
  PotentialSpec potential;
  std::optional<SpectrumSet> spectrum;  // user-certified spectrum of L
  AssemblyOptions assembly;
};

struct RunConfig {
  std::uint64_t seed = 1;
  PiecewisePotential1D periodic{{0.0, 0.5}, {0.0, 10.0}};
  std::size_t band_count = kDefaultBandCount;
  BandOptions band_options;
  RadialDesignSpec radial_design;
  CurvesSpec curves;
  GridSpec grid;
  ProblemSpec problem;
  SolverOptions solver;
  std::optional<std::filesystem::path> potential_file;  // input of the spectrum command
  std::filesystem::path output_dir = "curlgap_out";
};

// Built-in defaults as a JSON document; every key accepted by parse_config appears here.
nlohmann::json default_config();

// Applies "a.b.c=value" to doc. The value is parsed as JSON when possible,
// otherwise stored as a string.
void apply_override(nlohmann::json& doc, const std::string& assignment);

// Recursively overlays `patch` onto `base`; objects merge unless the patch
// carries a "type" key, everything else replaces.
void merge_into(nlohmann::json& base, const nlohmann::json& patch);

// Validates the document against the schema and converts it.
RunConfig parse_config(const nlohmann::json& doc);

// Defaults, then the optional file, then the overrides in order.
RunConfig load_config(const std::optional<std::filesystem::path>& file, const std::vector<std::string>& overrides);

nlohmann::json periodic_to_json(const PiecewisePotential1D& P);
PiecewisePotential1D periodic_from_json(const nlohmann::json& j, const std::string& where);

}  // namespace curlgap::cli
