#include "curlgap/periodic_spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "curlgap/errors.hpp"

namespace curlgap {

PiecewisePotential1D::PiecewisePotential1D(std::vector<double> breakpoints, std::vector<double> values)
    : breakpoints_(std::move(breakpoints)), values_(std::move(values)) {
  if (values_.empty()) throw PreconditionError("PiecewisePotential1D: at least one piece required");
  if (breakpoints_.size() != values_.size()) {
    throw PreconditionError("PiecewisePotential1D: breakpoints and values differ in length");
  }
  if (breakpoints_.front() != 0.0) throw PreconditionError("PiecewisePotential1D: first breakpoint must be 0");
  for (std::size_t k = 1; k < breakpoints_.size(); ++k) {
    if (!(breakpoints_[k] > breakpoints_[k - 1])) {
      throw PreconditionError("PiecewisePotential1D: breakpoints must be strictly increasing");
    }
  }
  if (!(breakpoints_.back() < 1.0)) throw PreconditionError("PiecewisePotential1D: breakpoints must lie in [0, 1)");
  for (double v : values_) {
    if (!std::isfinite(v)) throw PreconditionError("PiecewisePotential1D: values must be finite");
  }
}

double PiecewisePotential1D::piece_length(std::size_t k) const {
  const double end = k + 1 < breakpoints_.size() ? breakpoints_[k + 1] : 1.0;
  return end - breakpoints_[k];
}

double PiecewisePotential1D::operator()(double x) const {
  double y = x - std::floor(x);
  if (y >= 1.0) y = 0.0;
  auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), y);
  return values_[static_cast<std::size_t>(std::distance(breakpoints_.begin(), it)) - 1];
}

double PiecewisePotential1D::max() const { return *std::max_element(values_.begin(), values_.end()); }

double PiecewisePotential1D::min() const { return *std::min_element(values_.begin(), values_.end()); }

namespace {

// Entries of the constant-coefficient propagator as functions of s = nu - q:
//   c(s) = cos(sqrt(s) L),  S(s) = sin(sqrt(s) L) / sqrt(s)
// continued analytically through s = 0 (cosh/sinh for s < 0).
struct PieceFunctions {
  double c;
  double S;
  double dc;  // dc/ds
  double dS;  // dS/ds
};

PieceFunctions piece_functions(double s, double L) {
  const double z = s * L * L;
  PieceFunctions f{};
  if (std::abs(z) < 1e-3) {
    // Taylor series in z; truncation error below 1e-18 relative.
    const double L2 = L * L;
    f.c = 1.0 - z / 2.0 + z * z / 24.0 - z * z * z / 720.0 + z * z * z * z / 40320.0;
    f.S = L * (1.0 - z / 6.0 + z * z / 120.0 - z * z * z / 5040.0 + z * z * z * z / 362880.0);
    f.dc = L2 * (-1.0 / 2.0 + z / 12.0 - z * z / 240.0 + z * z * z / 10080.0);
    f.dS = L * L2 * (-1.0 / 6.0 + z / 60.0 - z * z / 1680.0 + z * z * z / 90720.0);
    return f;
  }
  if (s > 0.0) {
    const double k = std::sqrt(s);
    f.c = std::cos(k * L);
    f.S = std::sin(k * L) / k;
  } else {
    const double k = std::sqrt(-s);
    f.c = std::cosh(k * L);
    f.S = std::sinh(k * L) / k;
  }
  f.dc = -0.5 * L * f.S;
  f.dS = (L * f.c - f.S) / (2.0 * s);
  return f;
}

Matrix2 multiply(const Matrix2& a, const Matrix2& b) {
  Matrix2 r{};
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) r[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
  }
  return r;
}

Matrix2 add(const Matrix2& a, const Matrix2& b) {
  return {{{a[0][0] + b[0][0], a[0][1] + b[0][1]}, {a[1][0] + b[1][0], a[1][1] + b[1][1]}}};
}

struct MonodromyWithDerivative {
  Matrix2 m;
  Matrix2 dm;
};

MonodromyWithDerivative propagate(const PiecewisePotential1D& P, double nu) {
  Matrix2 m{{{1.0, 0.0}, {0.0, 1.0}}};
  Matrix2 dm{};
  for (std::size_t k = 0; k < P.pieces(); ++k) {
    const double s = nu - P.values()[k];
    const auto f = piece_functions(s, P.piece_length(k));
    // (u, u') -> [[c, S], [-s S, c]] (u, u')
    const Matrix2 piece{{{f.c, f.S}, {-s * f.S, f.c}}};
    const Matrix2 dpiece{{{f.dc, f.dS}, {-f.S - s * f.dS, f.dc}}};
    dm = add(multiply(dpiece, m), multiply(piece, dm));
    m = multiply(piece, m);
  }
  return {m, dm};
}

template <class F>
double bisect(F&& f, double lo, double hi) {
  double flo = f(lo);
  for (;;) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fmid = f(mid);
    if (fmid == 0.0) return mid;
    if ((fmid < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fmid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Critical points of the discriminant in (lo, hi], in increasing order. Each
// open or closed gap carries exactly one, none lie inside bands or below
// nu_1; consecutive critical values therefore alternate in sign. When two
// consecutive values share a sign the scan stepped over a pair and the
// offending subinterval is rescanned with a finer step.
void collect_critical_points(const PiecewisePotential1D& P, double lo, double hi, double step, int depth,
                             std::vector<double>& out) {
  const auto n = static_cast<std::size_t>(std::ceil((hi - lo) / step));
  const double h = (hi - lo) / static_cast<double>(n);
  double x0 = lo;
  double d0 = discriminant_derivative(P, x0);
  for (std::size_t i = 1; i <= n; ++i) {
    const double x1 = lo + h * static_cast<double>(i);
    const double d1 = discriminant_derivative(P, x1);
    if (d0 == 0.0) {
      out.push_back(x0);
    } else if ((d0 < 0.0) != (d1 < 0.0) && d1 != 0.0) {
      const double c = bisect([&P](double x) { return discriminant_derivative(P, x); }, x0, x1);
      if (depth < 12 && !out.empty()) {
        const double prev = discriminant(P, out.back());
        const double cur = discriminant(P, c);
        if ((prev < 0.0) == (cur < 0.0)) {
          // Missed an even number of critical points between out.back() and c.
          const double start = out.back();
          out.pop_back();
          collect_critical_points(P, start - h, x1, h / 16.0, depth + 1, out);
          x0 = x1;
          d0 = d1;
          continue;
        }
      }
      out.push_back(c);
    }
    x0 = x1;
    d0 = d1;
  }
}

}  // namespace

Matrix2 monodromy(const PiecewisePotential1D& P, double nu) { return propagate(P, nu).m; }

double discriminant(const PiecewisePotential1D& P, double nu) {
  const auto m = monodromy(P, nu);
  return m[0][0] + m[1][1];
}

double discriminant_derivative(const PiecewisePotential1D& P, double nu) {
  const auto r = propagate(P, nu);
  return r.dm[0][0] + r.dm[1][1];
}

BandStructure::BandStructure(std::vector<double> edges) : edges_(std::move(edges)) {
  if (edges_.empty() || edges_.size() % 2 != 0) throw PreconditionError("BandStructure: need an even, nonzero edge count");
  for (std::size_t k = 1; k < edges_.size(); ++k) {
    const bool band_interior = (k % 2) == 1;  // edges_[k-1], edges_[k] bound a band
    if (band_interior ? !(edges_[k] > edges_[k - 1]) : !(edges_[k] >= edges_[k - 1])) {
      throw PreconditionError("BandStructure: edges violate nu_{2k-1} < nu_{2k} <= nu_{2k+1}");
    }
  }
}

std::vector<Interval> BandStructure::bands() const {
  std::vector<Interval> out;
  for (std::size_t k = 0; k + 1 < edges_.size(); k += 2) out.push_back({edges_[k], edges_[k + 1]});
  return out;
}

BandStructure band_edges(const PiecewisePotential1D& P, std::size_t K, const BandOptions& options) {
  if (K == 0) throw PreconditionError("band_edges: K must be >= 1");

  // Below min P every piece is hyperbolic and the discriminant exceeds 2.
  const double lo = P.min() - 1.0;
  const double two_k_pi = 2.0 * static_cast<double>(K) * std::numbers::pi;
  double hi = std::min(options.window_cap, P.max() + two_k_pi * two_k_pi + 10.0);

  std::vector<double> critical;
  for (;;) {
    critical.clear();
    collect_critical_points(P, lo, hi, options.scan_step, 0, critical);
    if (critical.size() >= K) break;
    if (hi >= options.window_cap) {
      throw ConvergenceError("band_edges: could not resolve the requested bands below the window cap");
    }
    hi = std::min(options.window_cap, 2.0 * hi);
  }

  std::vector<double> edges;
  edges.reserve(2 * K);
  double branch_lo = lo;
  for (std::size_t k = 1; k <= K; ++k) {
    // On (c_{k-1}, c_k) the discriminant is monotone and runs from
    // 2 (-1)^{k-1} to 2 (-1)^k across band k.
    const double branch_hi = critical[k - 1];
    const double start_level = (k % 2 == 1) ? 2.0 : -2.0;
    const double end_level = -start_level;
    const double end_value = discriminant(P, branch_hi);
    // Closed gaps touch +-2 tangentially; rounding may leave them a hair outside.
    const bool gap_closed = std::abs(end_value) <= 2.0 + 1e-12;

    const double lower_edge =
        (k == 1 || edges.back() != branch_lo)
            ? bisect([&](double x) { return discriminant(P, x) - start_level; }, branch_lo, branch_hi)
            : branch_lo;
    const double upper_edge =
        gap_closed ? branch_hi
                   : bisect([&](double x) { return discriminant(P, x) - end_level; }, branch_lo, branch_hi);
    edges.push_back(lower_edge);
    edges.push_back(upper_edge);
    branch_lo = branch_hi;
  }
  return BandStructure(std::move(edges));
}

SpectrumSet spectrum_1d(const BandStructure& bands) {
  return SpectrumSet({}, bands.bands(), bands.edges().back());
}

SpectrumSet spectrum_1d(const PiecewisePotential1D& P, std::size_t K, const BandOptions& options) {
  return spectrum_1d(band_edges(P, K, options));
}

FirstGap first_gap(const BandStructure& bands) {
  if (bands.band_count() < 2) throw PreconditionError("first_gap: need at least two bands");
  const FirstGap gap{bands.edge(2), bands.edge(3)};
  if (gap.nu3 - gap.nu2 <= 1e-9) throw GapClosedError("first gap of the periodic potential is closed (nu_2 = nu_3)");
  return gap;
}

FirstGap first_gap(const PiecewisePotential1D& P) { return first_gap(band_edges(P, 2)); }

}  // namespace curlgap
