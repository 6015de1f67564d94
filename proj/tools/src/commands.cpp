#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "curlgap/bessel.hpp"
#include "curlgap/errors.hpp"
#include "curlgap/ground_state.hpp"
#include "curlgap/io.hpp"

namespace curlgap::cli {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

fs::path prepare_output(const RunConfig& c) {
  fs::create_directories(c.output_dir);
  return c.output_dir;
}

std::ofstream open_output(const fs::path& file) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + file.string());
  return out;
}

void write_json(const fs::path& file, const json& j) { open_output(file) << j.dump(2) << '\n'; }

json parse_json(const std::string& text) { return json::parse(text); }

std::string num(double x) { return io::format_double(x); }

PotentialDesign design_from_config(const RunConfig& c) {
  double winf = 0.0;
  if (c.radial_design.winf) {
    winf = *c.radial_design.winf;
  } else {
    const BandStructure b = band_edges(c.periodic, c.band_count, c.band_options);
    winf = -b.edge(1) + c.radial_design.winf_margin;
  }
  return design_potential(c.periodic, winf, c.radial_design.eta, c.radial_design.mu0_fraction, c.band_count);
}

GapCertificate certify(const SpectrumSet& s, const BandStructure& bands, double mu0, double winf) {
  GapCertificate cert = gap_margin(s, 0.0);
  cert.chain = GapChain::evaluate(bands.edge(1), bands.edge(2), bands.edge(3), mu0, winf);
  return cert;
}

}  // namespace

void cmd_bands(const RunConfig& c, bool require_gap, std::ostream& out) {
  const BandStructure b = band_edges(c.periodic, c.band_count, c.band_options);
  const fs::path dir = prepare_output(c);
  {
    std::ofstream csv = open_output(dir / "bands.csv");
    csv << "k,nu_lo,nu_hi\n";
    for (std::size_t k = 1; k <= b.band_count(); ++k) {
      csv << k << ',' << num(b.edge(2 * k - 1)) << ',' << num(b.edge(2 * k)) << '\n';
    }
  }
  json gaps = json::array();
  for (std::size_t k = 1; k < b.band_count(); ++k) {
    const double lo = b.edge(2 * k);
    const double hi = b.edge(2 * k + 1);
    gaps.push_back({{"k", k}, {"lo", lo}, {"hi", hi}, {"width", hi - lo}, {"open", hi - lo > 1e-9}});
  }
  const bool first_open = !gaps.empty() && gaps[0]["open"].get<bool>();
  write_json(dir / "bands_report.json",
             {{"edges", b.edges()}, {"gaps", gaps}, {"first_gap_open", first_open}, {"band_count", b.band_count()}});

  out << "nu1=" << num(b.edge(1)) << '\n';
  for (const auto& g : gaps) {
    out << "gap " << g["k"].get<std::size_t>() << ": (" << num(g["lo"].get<double>()) << ", "
        << num(g["hi"].get<double>()) << ") width=" << num(g["width"].get<double>())
        << (g["open"].get<bool>() ? "" : " closed") << '\n';
  }
  if (require_gap) first_gap(b);
}

json potential_json(const PotentialDesign& d) {
  const auto& r = d.radial;
  return {
      {"periodic", periodic_to_json(d.periodic)},
      {"radial", {{"w0", r.w0}, {"winf", r.winf}, {"delta", r.delta}}},
      {"design", {{"mu0", r.mu0}, {"eta", r.eta}, {"xi", r.xi}}},
      {"band_edges", d.bands.edges()},
      {"spectrum", parse_json(to_json(d.spectrum))},
      {"positivity",
       {{"esssup_V", d.positivity.esssup_V},
        {"esssup_P", d.positivity.esssup_P},
        {"nu1", d.positivity.nu1},
        {"esssup_V_positive", d.positivity.esssup_V_positive},
        {"nu1_below_esssup_P", d.positivity.nu1_below_esssup_P}}},
  };
}

LoadedPotential read_potential_file(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open potential file " + file.string());
  const json j = json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw ConfigError(file.string() + " is not a JSON object");
  if (!j.contains("periodic") || !j.contains("radial")) {
    throw ConfigError(file.string() + ": expected 'periodic' and 'radial' sections");
  }
  const json& r = j.at("radial");
  for (const char* k : {"w0", "winf", "delta"}) {
    if (!r.contains(k) || !r.at(k).is_number()) throw ConfigError(file.string() + ": radial." + k + " must be a number");
  }
  try {
    return {periodic_from_json(j.at("periodic"), "periodic"),
            StepRadialPotential(r.at("w0").get<double>(), r.at("winf").get<double>(), r.at("delta").get<double>())};
  } catch (const PreconditionError& e) {
    throw ConfigError(file.string() + ": " + e.what());
  }
}

SpectrumSet separable_spectrum(const LoadedPotential& pot, std::size_t band_count, const BandOptions& options) {
  if (!pot.radial.single_eigenvalue_condition()) {
    throw PreconditionError("radial well violates the single-eigenvalue condition (j1/delta)^2 < winf - w0 < (j2'/delta)^2");
  }
  const BandStructure bands = band_edges(pot.periodic, band_count, options);
  return assemble(radial_spectrum(pot.radial), bands, pot.radial.winf());
}

void cmd_design(const RunConfig& c, std::ostream& out) {
  const PotentialDesign d = design_from_config(c);
  const fs::path dir = prepare_output(c);
  write_json(dir / "potential.json", potential_json(d));
  write_json(dir / "certificate.json", parse_json(io::certificate_json(d.certificate)));
  const auto& r = d.radial;
  out << "mu0=" << num(r.mu0) << "\nwinf=" << num(r.winf) << "\ndelta=" << num(r.delta) << "\nw0=" << num(r.w0)
      << "\nmargin=" << num(d.certificate.margin) << "\nesssup_V=" << num(d.positivity.esssup_V) << '\n';
}

void cmd_curves(const RunConfig& c, std::ostream& out) {
  const auto& cv = c.curves;
  const StepRadialPotential pot(cv.w0, cv.winf, cv.delta);
  const auto& zeros = bessel::BesselZeroTable::standard();
  const double pole = cv.w0 + std::pow(zeros.jp[0] / cv.delta, 2);
  const double zero = cv.w0 + std::pow(zeros.j[0] / cv.delta, 2);

  const auto eval = [](auto&& f) -> std::optional<double> {
    try {
      const double v = f();
      return std::isfinite(v) ? std::optional<double>(v) : std::nullopt;
    } catch (const DomainError&) {
      return std::nullopt;
    }
  };

  const fs::path dir = prepare_output(c);
  std::ofstream csv = open_output(dir / "curves.csv");
  csv << "mu,g,h\n";
  std::size_t crossings = 0;
  std::optional<double> prev_diff;
  const double step = (cv.winf - cv.w0) / static_cast<double>(cv.samples);
  // poles of g: sqrt(mu - w0) delta at a zero of J1'
  std::vector<double> poles;
  for (double jp : zeros.jp) {
    const double q = cv.w0 + std::pow(jp / cv.delta, 2);
    if (q < cv.winf) poles.push_back(q);
  }
  for (std::size_t k = 0; k < cv.samples; ++k) {
    const double mu = cv.w0 + (static_cast<double>(k) + 0.5) * step;
    const bool cell_has_pole = std::any_of(poles.begin(), poles.end(),
                                           [&](double q) { return std::abs(q - mu) <= 0.5 * step; });
    std::optional<double> g;
    if (!cell_has_pole) g = eval([&] { return matching_g(pot, mu); });
    const auto h = eval([&] { return matching_h(pot, mu); });
    csv << num(mu) << ',' << (g ? num(*g) : "") << ',' << (h ? num(*h) : "") << '\n';
    if (mu > pole && mu < zero && g && h) {
      const double diff = *g - *h;
      if (prev_diff && ((*prev_diff < 0.0) != (diff < 0.0))) ++crossings;
      prev_diff = diff;
    }
  }

  std::optional<double> eigenvalue;
  if (pot.single_eigenvalue_condition()) eigenvalue = radial_eigenvalue(pot);
  write_json(dir / "curves_report.json", {{"delta", cv.delta},
                                          {"w0", cv.w0},
                                          {"winf", cv.winf},
                                          {"samples", cv.samples},
                                          {"g_pole", pole},
                                          {"g_zero", zero},
                                          {"crossings_between_pole_and_zero", crossings},
                                          {"eigenvalue", eigenvalue ? json(*eigenvalue) : json(nullptr)}});
  out << "g_pole=" << num(pole) << "\ng_zero=" << num(zero) << "\ncrossings=" << crossings << '\n';
  if (eigenvalue) out << "eigenvalue=" << num(*eigenvalue) << '\n';
}

void cmd_spectrum(const RunConfig& c, std::ostream& out) {
  const fs::path file = c.potential_file.value_or(c.output_dir / "potential.json");
  const LoadedPotential pot = read_potential_file(file);
  const BandStructure bands = band_edges(pot.periodic, c.band_count, c.band_options);
  const SpectrumSet s = separable_spectrum(pot, c.band_count, c.band_options);
  const double mu0 = radial_eigenvalue(pot.radial);
  const GapCertificate cert = certify(s, bands, mu0, pot.radial.winf());

  const fs::path dir = prepare_output(c);
  write_json(dir / "spectrum.json", {{"spectrum", parse_json(to_json(s))},
                                     {"mu0", mu0},
                                     {"certificate", parse_json(io::certificate_json(cert))}});
  out << "min=" << num(*s.min()) << "\nmargin=" << num(cert.margin) << '\n';
  if (cert.chain && !cert.chain->all_hold()) out << "chain fails: " << *cert.chain->first_failure() << '\n';
}

void cmd_groundstate(const RunConfig& c, std::ostream& out) {
  const CylGrid grid(c.grid.r_max, c.grid.z_half, c.grid.nr, c.grid.nz);
  Problem prob{grid, nullptr, c.problem.gamma.sampler(), c.problem.p, c.problem.mode, std::nullopt, c.problem.assembly};

  if (c.problem.potential.kind == PotentialSpec::Kind::constant) {
    const double v = c.problem.potential.value;
    prob.V = [v](double, double) { return v; };
    // sigma(-Delta) = [0, inf) on the cylinder-symmetric space
    prob.spectrum = SpectrumSet::half_line(v);
  } else {
    LoadedPotential pot = c.problem.potential.file ? read_potential_file(*c.problem.potential.file) : [&] {
      const PotentialDesign d = design_from_config(c);
      return LoadedPotential{d.periodic, d.radial.potential()};
    }();
    prob.spectrum = separable_spectrum(pot, c.band_count, c.band_options);
    prob.V = [W = pot.radial, P = pot.periodic](double r, double z) { return W(r) + P(z); };
  }
  if (c.problem.spectrum) prob.spectrum = c.problem.spectrum;

  const GroundStateResult res =
      prob.mode == Mode::focusing ? solve_focusing(prob, c.solver) : solve_defocusing(prob, c.solver);

  const fs::path dir = prepare_output(c);
  {
    std::ofstream csv = open_output(dir / "field.csv");
    io::write_field_csv(csv, res.u);
  }
  open_output(dir / "grid.json") << io::grid_sidecar_json(grid) << '\n';
  json report = parse_json(io::result_json(res));
  report["mode"] = prob.mode == Mode::focusing ? "focusing" : "defocusing";
  report["p"] = prob.p;
  write_json(dir / "result.json", report);

  out << "energy=" << num(res.energy) << "\nel_residual=" << num(res.el_residual) << "\nscale=" << num(res.scale)
      << "\nnontrivial=" << (res.nontrivial ? "true" : "false") << "\niterations=" << res.iterations << '\n';
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spectral-gap potentials and ground states of the curl-curl equation", "curlgap"};
  app.require_subcommand(1);

  std::string config_file;
  std::vector<std::string> overrides;
  bool require_gap = false;

  const auto common = [&](CLI::App* sub) {
    sub->add_option("-c,--config", config_file, "JSON config file");
    sub->add_option("--set", overrides, "Override a config value, key.path=value")->allow_extra_args(false);
  };
  CLI::App* bands = app.add_subcommand("bands", "Band edges of the periodic potential");
  CLI::App* design = app.add_subcommand("design", "Design the radial well and certify the gap at 0");
  CLI::App* curves = app.add_subcommand("curves", "Sample the matching functions g and h");
  CLI::App* spectrum = app.add_subcommand("spectrum", "Spectrum and gap margin of a potential file");
  CLI::App* groundstate = app.add_subcommand("groundstate", "Compute a ground state");
  for (CLI::App* sub : {bands, design, curves, spectrum, groundstate}) common(sub);
  bands->add_flag("--require-gap", require_gap, "Fail when the first gap is closed");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    const RunConfig c =
        load_config(config_file.empty() ? std::nullopt : std::optional<fs::path>(config_file), overrides);
    if (bands->parsed()) cmd_bands(c, require_gap, out);
    if (design->parsed()) cmd_design(c, out);
    if (curves->parsed()) cmd_curves(c, out);
    if (spectrum->parsed()) cmd_spectrum(c, out);
    if (groundstate->parsed()) cmd_groundstate(c, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const ChainViolation& e) {
    err << "hypothesis violated: " << e.inequality() << " fails: " << e.what() << '\n';
    return kHypothesisViolation;
  } catch (const PreconditionError& e) {
    err << "hypothesis violated: " << e.what() << '\n';
    return kHypothesisViolation;
  } catch (const ConvergenceError& e) {
    err << "not converged: " << e.what() << '\n';
    return kNonConvergence;
  } catch (const NoRootError& e) {
    err << "not converged: " << e.what() << '\n';
    return kNonConvergence;
  } catch (const TruncationError& e) {
    err << "not converged: " << e.what() << '\n';
    return kNonConvergence;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  }
  return kOk;
}

}  // namespace curlgap::cli
