#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "config.hpp"
#include "curlgap/spectrum_assembly.hpp"

namespace curlgap::cli {

enum ExitCode : int { kOk = 0, kConfigError = 1, kHypothesisViolation = 2, kNonConvergence = 3 };

// Band-edge table bands.csv (k, nu_lo, nu_hi) and bands_report.json. With
// require_gap a closed first gap raises GapClosedError.
void cmd_bands(const RunConfig& c, bool require_gap, std::ostream& out);

// potential.json (re-ingestable by cmd_spectrum) and certificate.json.
void cmd_design(const RunConfig& c, std::ostream& out);

// curves.csv (mu, g, h) with empty cells at poles, and curves_report.json.
void cmd_curves(const RunConfig& c, std::ostream& out);

// spectrum.json for the potential file named in the config (default
// <output_dir>/potential.json).
void cmd_spectrum(const RunConfig& c, std::ostream& out);

// field.csv, grid.json and result.json.
void cmd_groundstate(const RunConfig& c, std::ostream& out);

// Potential file contents: the periodic profile, the radial well and the
// design record.
nlohmann::json potential_json(const PotentialDesign& d);

struct LoadedPotential {
  PiecewisePotential1D periodic;
  StepRadialPotential radial;
};
LoadedPotential read_potential_file(const std::filesystem::path& file);

// Spectrum of L for a separable potential: {mu0} + sigma(L_p) with the
// essential part [nu1 + winf, inf).
SpectrumSet separable_spectrum(const LoadedPotential& pot, std::size_t band_count, const BandOptions& options);

// Parses argv-style arguments (without the program name), runs the command
// and maps errors to exit codes.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace curlgap::cli
