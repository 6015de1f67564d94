#pragma once

#include <array>
#include <cstddef>
#include <utility>
#include <vector>

#include "curlgap/spectrum_set.hpp"

namespace curlgap {

// 1-periodic potential, constant on [breakpoints[k], breakpoints[k+1]) with
// the last piece ending at 1.
class PiecewisePotential1D {
 public:
  PiecewisePotential1D(std::vector<double> breakpoints, std::vector<double> values);

  static PiecewisePotential1D constant(double value) { return {{0.0}, {value}}; }

  const std::vector<double>& breakpoints() const { return breakpoints_; }
  const std::vector<double>& values() const { return values_; }
  std::size_t pieces() const { return values_.size(); }
  double piece_length(std::size_t k) const;

  double operator()(double x) const;  // periodic extension
  double max() const;                 // esssup
  double min() const;                 // essinf
  bool is_constant() const { return max() == min(); }

 private:
  std::vector<double> breakpoints_;
  std::vector<double> values_;
};

using Matrix2 = std::array<std::array<double, 2>, 2>;

// Period map of -u'' + (P - nu) u = 0 acting on (u, u').
Matrix2 monodromy(const PiecewisePotential1D& P, double nu);

// Floquet discriminant, trace of the monodromy matrix.
double discriminant(const PiecewisePotential1D& P, double nu);

// d/dnu of the discriminant, by propagating the derivative of each piece.
double discriminant_derivative(const PiecewisePotential1D& P, double nu);

class BandStructure {
 public:
  explicit BandStructure(std::vector<double> edges);

  // nu_1 <= nu_2 <= ... ; band k (1-based) is [edge(2k-1), edge(2k)].
  const std::vector<double>& edges() const { return edges_; }
  double edge(std::size_t one_based) const { return edges_.at(one_based - 1); }
  std::size_t band_count() const { return edges_.size() / 2; }
  std::vector<Interval> bands() const;

 private:
  std::vector<double> edges_;
};

struct BandOptions {
  double scan_step = 0.05;
  double window_cap = 1.0e7;  // hard ceiling for the auto-expanding scan window
};

// First 2K band edges. Throws ConvergenceError if the K-th gap cannot be
// located below the window cap.
BandStructure band_edges(const PiecewisePotential1D& P, std::size_t K, const BandOptions& options = {});

// Bands 1..K as intervals; the unresolved range above is represented
// conservatively by [nu_{2K}, inf), which merges with band K.
SpectrumSet spectrum_1d(const PiecewisePotential1D& P, std::size_t K, const BandOptions& options = {});
SpectrumSet spectrum_1d(const BandStructure& bands);

struct FirstGap {
  double nu2;
  double nu3;
};

// (nu_2, nu_3); throws GapClosedError when nu_3 - nu_2 <= 1e-9.
FirstGap first_gap(const PiecewisePotential1D& P);
FirstGap first_gap(const BandStructure& bands);

inline constexpr std::size_t kDefaultBandCount = 8;

}  // namespace curlgap
