#include "config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "curlgap/errors.hpp"

namespace curlgap::cli {
namespace {

using nlohmann::json;

const char* kDefaults = R"({
  "seed": 1,
  "periodic": {"breakpoints": [0.0, 0.5], "values": [0.0, 10.0]},
  "bands": {"count": 8, "scan_step": 0.05, "window_cap": 1e7},
  "radial_design": {"winf": null, "winf_margin": 1.0, "eta": 3.5, "mu0_fraction": 0.5},
  "curves": {"delta": 1.0, "w0": 0.0, "winf": 20.0, "samples": 2000},
  "grid": {"r_max": 12.0, "z_half": 12.0, "nr": 64, "nz": 64},
  "problem": {
    "p": 3.0,
    "mode": "focusing",
    "gamma": {"type": "constant", "value": 1.0},
    "potential": {"type": "constant", "value": 1.0},
    "spectrum": null,
    "assembly": {"samples_r": 1, "samples_z": 1}
  },
  "solver": {
    "tol_inner": 1e-10,
    "tol_outer": 1e-8,
    "max_iterations": 4000,
    "inner_max_iterations": 200,
    "random_starts": 8,
    "k_neg_max": 64,
    "nontrivial_threshold": 1e-6
  },
  "spectrum": {"potential_file": null},
  "output_dir": "curlgap_out"
})";

// Field access with the dotted path kept for messages.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(label() + " must be an object");
  }

  void allow_only(std::initializer_list<const char*> keys) const {
    const std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& [k, v] : j_.items()) {
      if (!allowed.count(k)) throw ConfigError("unknown key " + key(k));
    }
  }

  bool has(const char* k) const { return j_.contains(k) && !j_.at(k).is_null(); }

  const json& at(const char* k) const {
    if (!j_.contains(k)) throw ConfigError("missing key " + key(k));
    return j_.at(k);
  }

  Section sub(const char* k) const { return Section(at(k), key(k)); }

  double number(const char* k) const {
    const json& v = at(k);
    if (!v.is_number()) throw ConfigError(key(k) + " must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError(key(k) + " must be finite");
    return x;
  }

  double positive(const char* k) const {
    const double x = number(k);
    if (!(x > 0.0)) throw ConfigError(key(k) + " must be positive");
    return x;
  }

  std::uint64_t count(const char* k, std::uint64_t min = 0) const {
    const json& v = at(k);
    if (!v.is_number_unsigned()) {
      throw ConfigError(key(k) + " must be a non-negative integer");
    }
    const auto n = v.get<std::uint64_t>();
    if (n < min) throw ConfigError(key(k) + " must be at least " + std::to_string(min));
    return n;
  }

  std::string text(const char* k) const {
    const json& v = at(k);
    if (!v.is_string()) throw ConfigError(key(k) + " must be a string");
    return v.get<std::string>();
  }

  std::vector<double> numbers(const char* k) const {
    const json& v = at(k);
    if (!v.is_array() || v.empty()) throw ConfigError(key(k) + " must be a non-empty array of numbers");
    std::vector<double> out;
    for (const auto& e : v) {
      if (!e.is_number()) throw ConfigError(key(k) + " must be a non-empty array of numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }

  std::string key(const std::string& k) const { return path_.empty() ? k : path_ + "." + k; }
  std::string label() const { return path_.empty() ? "config" : path_; }

 private:
  const json& j_;
  std::string path_;
};

GammaSpec parse_gamma(const Section& s) {
  GammaSpec g;
  const std::string type = s.text("type");
  if (type == "constant") {
    s.allow_only({"type", "value"});
    g.kind = GammaSpec::Kind::constant;
    g.value = s.number("value");
  } else if (type == "power") {
    s.allow_only({"type", "coefficient", "exponent"});
    g.kind = GammaSpec::Kind::power;
    g.coefficient = s.number("coefficient");
    g.exponent = s.number("exponent");
  } else if (type == "table") {
    s.allow_only({"type", "radii", "values"});
    g.kind = GammaSpec::Kind::table;
    g.radii = s.numbers("radii");
    g.values = s.numbers("values");
    if (g.radii.size() != g.values.size()) throw ConfigError(s.key("radii") + " and values differ in length");
    if (!std::is_sorted(g.radii.begin(), g.radii.end()) ||
        std::adjacent_find(g.radii.begin(), g.radii.end()) != g.radii.end() || g.radii.front() < 0.0) {
      throw ConfigError(s.key("radii") + " must be non-negative and strictly increasing");
    }
  } else {
    throw ConfigError(s.key("type") + " must be constant, power or table");
  }
  return g;
}

PotentialSpec parse_potential(const Section& s) {
  PotentialSpec v;
  const std::string type = s.text("type");
  if (type == "constant") {
    s.allow_only({"type", "value"});
    v.kind = PotentialSpec::Kind::constant;
    v.value = s.number("value");
  } else if (type == "designed") {
    s.allow_only({"type", "file"});
    v.kind = PotentialSpec::Kind::designed;
    if (s.has("file")) v.file = s.text("file");
  } else {
    throw ConfigError(s.key("type") + " must be constant or designed");
  }
  return v;
}

}  // namespace

Sampler GammaSpec::sampler() const {
  switch (kind) {
    case Kind::constant:
      return [v = value](double, double) { return v; };
    case Kind::power:
      return [c = coefficient, e = exponent](double r, double z) { return c * std::pow(1.0 + std::hypot(r, z), e); };
    case Kind::table:
      break;
  }
  return [rs = radii, vs = values](double r, double z) {
    const double rho = std::hypot(r, z);
    if (rho <= rs.front()) return vs.front();
    if (rho >= rs.back()) return vs.back();
    const auto k = static_cast<std::size_t>(std::upper_bound(rs.begin(), rs.end(), rho) - rs.begin());
    const double s = (rho - rs[k - 1]) / (rs[k] - rs[k - 1]);
    return (1.0 - s) * vs[k - 1] + s * vs[k];
  };
}

json default_config() { return json::parse(kDefaults); }

void merge_into(json& base, const json& patch) {
  if (!base.is_object() || !patch.is_object()) {
    base = patch;
    return;
  }
  for (const auto& [k, v] : patch.items()) {
    // typed objects (gamma, potential) are replaced as a whole
    if (base.contains(k) && base[k].is_object() && v.is_object() && !v.contains("type")) {
      merge_into(base[k], v);
    } else {
      base[k] = v;
    }
  }
}

void apply_override(json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("--set expects key=value, got '" + assignment + "'");
  const std::string path = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;

  json* node = &doc;
  std::stringstream ss(path);
  std::string part;
  std::vector<std::string> parts;
  while (std::getline(ss, part, '.')) {
    if (part.empty()) throw ConfigError("--set: empty component in '" + path + "'");
    parts.push_back(part);
  }
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    if (!node->is_object()) throw ConfigError("--set: '" + path + "' does not name an object member");
    if (!node->contains(parts[i]) || (*node)[parts[i]].is_null()) (*node)[parts[i]] = json::object();
    node = &(*node)[parts[i]];
  }
  if (!node->is_object()) throw ConfigError("--set: '" + path + "' does not name an object member");
  (*node)[parts.back()] = std::move(value);
}

json periodic_to_json(const PiecewisePotential1D& P) {
  return json{{"breakpoints", P.breakpoints()}, {"values", P.values()}};
}

PiecewisePotential1D periodic_from_json(const json& j, const std::string& where) {
  const Section s(j, where);
  s.allow_only({"breakpoints", "values"});
  try {
    return PiecewisePotential1D(s.numbers("breakpoints"), s.numbers("values"));
  } catch (const PreconditionError& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

RunConfig parse_config(const json& doc) {
  const Section root(doc, "");
  root.allow_only({"seed", "periodic", "bands", "radial_design", "curves", "grid", "problem", "solver", "spectrum",
                   "output_dir"});
  RunConfig c;
  c.seed = root.count("seed");
  c.periodic = periodic_from_json(root.at("periodic"), "periodic");

  const Section bands = root.sub("bands");
  bands.allow_only({"count", "scan_step", "window_cap"});
  c.band_count = bands.count("count", 2);
  c.band_options.scan_step = bands.positive("scan_step");
  c.band_options.window_cap = bands.positive("window_cap");

  const Section rd = root.sub("radial_design");
  rd.allow_only({"winf", "winf_margin", "eta", "mu0_fraction"});
  if (rd.has("winf")) c.radial_design.winf = rd.number("winf");
  c.radial_design.winf_margin = rd.number("winf_margin");
  c.radial_design.eta = rd.positive("eta");
  c.radial_design.mu0_fraction = rd.number("mu0_fraction");
  if (!(c.radial_design.mu0_fraction > 0.0 && c.radial_design.mu0_fraction < 1.0)) {
    throw ConfigError("radial_design.mu0_fraction must lie in (0, 1)");
  }

  const Section cv = root.sub("curves");
  cv.allow_only({"delta", "w0", "winf", "samples"});
  c.curves.delta = cv.positive("delta");
  c.curves.w0 = cv.number("w0");
  c.curves.winf = cv.number("winf");
  c.curves.samples = cv.count("samples", 1);
  if (!(c.curves.w0 < c.curves.winf)) throw ConfigError("curves: w0 must be below winf");

  const Section g = root.sub("grid");
  g.allow_only({"r_max", "z_half", "nr", "nz"});
  c.grid.r_max = g.positive("r_max");
  c.grid.z_half = g.positive("z_half");
  c.grid.nr = g.count("nr", 2);
  c.grid.nz = g.count("nz", 2);

  const Section pr = root.sub("problem");
  pr.allow_only({"p", "mode", "gamma", "potential", "spectrum", "assembly"});
  c.problem.p = pr.number("p");
  const std::string mode = pr.text("mode");
  if (mode == "focusing") {
    c.problem.mode = Mode::focusing;
  } else if (mode == "defocusing") {
    c.problem.mode = Mode::defocusing;
  } else {
    throw ConfigError("problem.mode must be focusing or defocusing");
  }
  c.problem.gamma = parse_gamma(pr.sub("gamma"));
  c.problem.potential = parse_potential(pr.sub("potential"));
  if (pr.has("spectrum")) {
    try {
      c.problem.spectrum = spectrum_from_json(pr.at("spectrum").dump());
    } catch (const std::exception& e) {
      throw ConfigError(std::string("problem.spectrum: ") + e.what());
    }
  }
  const Section as = pr.sub("assembly");
  as.allow_only({"samples_r", "samples_z"});
  c.problem.assembly.samples_r = as.count("samples_r", 1);
  c.problem.assembly.samples_z = as.count("samples_z", 1);

  const Section sv = root.sub("solver");
  sv.allow_only({"tol_inner", "tol_outer", "max_iterations", "inner_max_iterations", "random_starts", "k_neg_max",
                 "nontrivial_threshold"});
  c.solver.tol_inner = sv.positive("tol_inner");
  c.solver.tol_outer = sv.positive("tol_outer");
  c.solver.max_iterations = sv.count("max_iterations", 1);
  c.solver.inner_max_iterations = sv.count("inner_max_iterations", 1);
  c.solver.random_starts = sv.count("random_starts");
  c.solver.k_neg_max = sv.count("k_neg_max");
  c.solver.nontrivial_threshold = sv.positive("nontrivial_threshold");
  c.solver.seed = c.seed;
  c.solver.eigen.seed = c.seed;

  const Section sp = root.sub("spectrum");
  sp.allow_only({"potential_file"});
  if (sp.has("potential_file")) c.potential_file = sp.text("potential_file");

  c.output_dir = root.text("output_dir");
  if (c.output_dir.empty()) throw ConfigError("output_dir must not be empty");
  return c;
}

RunConfig load_config(const std::optional<std::filesystem::path>& file, const std::vector<std::string>& overrides) {
  json doc = default_config();
  if (file) {
    std::ifstream in(*file);
    if (!in) throw ConfigError("cannot open config file " + file->string());
    json user = json::parse(in, nullptr, false);
    if (user.is_discarded()) throw ConfigError("config file " + file->string() + " is not valid JSON");
    if (!user.is_object()) throw ConfigError("config file " + file->string() + " must hold a JSON object");
    merge_into(doc, user);
  }
  for (const auto& o : overrides) apply_override(doc, o);
  return parse_config(doc);
}

}  // namespace curlgap::cli
