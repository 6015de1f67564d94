#include "curlgap/field_tools.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "curlgap/errors.hpp"

namespace curlgap {
namespace {

struct Stencil1D {
  long lo;  // node index or -1 for a boundary zero
  long hi;
  double t;  // weight of hi
};

// Locates x between cell-centered nodes c_k = origin + (k + 1/2) h, k < n.
// clamp_low keeps the first node value below it; otherwise the boundary at
// `origin` carries a zero. The upper boundary origin + n h always carries 0.
Stencil1D locate(double x, double origin, double h, std::size_t n, bool clamp_low) {
  const double s = (x - origin) / h - 0.5;
  const auto last = static_cast<long>(n) - 1;
  if (s < 0.0) {
    if (clamp_low) return {0, 0, 0.0};
    return {-1, 0, std::clamp(1.0 + 2.0 * s, 0.0, 1.0)};
  }
  if (s >= static_cast<double>(last)) {
    return {last, -1, std::clamp(2.0 * (s - static_cast<double>(last)), 0.0, 1.0)};
  }
  const auto k = static_cast<long>(std::floor(s));
  return {k, k + 1, s - static_cast<double>(k)};
}

double node(const Field& u, long i, long j) {
  if (i < 0 || j < 0) return 0.0;
  return u(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
}

double interpolate_unchecked(const Field& u, double r, double z) {
  const auto& g = u.grid();
  const auto sr = locate(r, 0.0, g.hr(), g.nr(), true);
  const auto sz = locate(z, -g.z_half(), g.hz(), g.nz(), false);
  const double a = (1.0 - sz.t) * node(u, sr.lo, sz.lo) + sz.t * node(u, sr.lo, sz.hi);
  const double b = (1.0 - sz.t) * node(u, sr.hi, sz.lo) + sz.t * node(u, sr.hi, sz.hi);
  return (1.0 - sr.t) * a + sr.t * b;
}

std::array<long, 4> cell_of(const Field& u, double r, double z) {
  const auto& g = u.grid();
  const auto sr = locate(r, 0.0, g.hr(), g.nr(), true);
  const auto sz = locate(z, -g.z_half(), g.hz(), g.nz(), false);
  return {sr.lo, sr.hi, sz.lo, sz.hi};
}

// Zero outside the closed cylinder, for the Cartesian quadrature.
Vec3 field_or_zero(const Field& u, double x, double y, double z) {
  const auto& g = u.grid();
  const double r = std::hypot(x, y);
  if (r >= g.r_max() || std::abs(z) >= g.z_half()) return {0.0, 0.0, 0.0};
  const double v = interpolate_unchecked(u, r, z);
  return {-y * v, x * v, 0.0};
}

}  // namespace

HardyResult hardy_check(const Field& u) {
  const auto& g = u.grid();
  const double hr = g.hr();
  const double hz = g.hz();
  HardyResult out{0.0, 0.0};
  for (std::size_t i = 0; i < g.nr(); ++i) {
    const double ri = g.r(i);
    const double face = std::pow(static_cast<double>(i + 1) * hr, 3);
    const double axial = g.radial_mass(i) * hr / hz;
    for (std::size_t j = 0; j < g.nz(); ++j) {
      const double v = u(i, j);
      out.lhs += v * v * ri * hr * hz;
      if (i + 1 < g.nr()) {
        const double d = u(i + 1, j) - v;
        out.rhs += hz * face * d * d / hr;
      } else {
        out.rhs += 2.0 * hz * face * v * v / hr;
      }
      if (j + 1 < g.nz()) {
        const double d = u(i, j + 1) - v;
        out.rhs += axial * d * d;
      }
      if (j == 0 || j + 1 == g.nz()) out.rhs += 2.0 * axial * v * v;
    }
  }
  return out;
}

double interpolate(const Field& u, double r, double x3) {
  const auto& g = u.grid();
  if (!(r >= 0.0 && r < g.r_max() && std::abs(x3) < g.z_half())) {
    throw DomainError("interpolate: point outside the cylinder");
  }
  return interpolate_unchecked(u, r, x3);
}

std::vector<Vec3> reconstruct_field(const Field& u, const std::vector<Vec3>& points) {
  std::vector<Vec3> out;
  out.reserve(points.size());
  for (const auto& p : points) {
    const double v = interpolate(u, std::hypot(p[0], p[1]), p[2]);
    out.push_back({-p[1] * v, p[0] * v, 0.0});
  }
  return out;
}

DivergenceReport divergence_check(const Field& u, const std::vector<Vec3>& points, double eps) {
  DivergenceReport rep{0.0, 0.0, 0};
  for (const auto& p : points) {
    const auto cell = cell_of(u, std::hypot(p[0], p[1]), p[2]);
    double jac[3][3];
    bool inside = true;
    for (int d = 0; d < 3 && inside; ++d) {
      Vec3 a = p;
      Vec3 b = p;
      a[d] += eps;
      b[d] -= eps;
      inside = cell_of(u, std::hypot(a[0], a[1]), a[2]) == cell && cell_of(u, std::hypot(b[0], b[1]), b[2]) == cell;
      const auto ua = reconstruct_field(u, {a}).front();
      const auto ub = reconstruct_field(u, {b}).front();
      for (int c = 0; c < 3; ++c) jac[c][d] = (ua[c] - ub[c]) / (2.0 * eps);
    }
    if (!inside) continue;
    ++rep.points;
    double frob = 0.0;
    for (auto& row : jac) {
      for (double v : row) frob += v * v;
    }
    rep.max_divergence = std::max(rep.max_divergence, std::abs(jac[0][0] + jac[1][1] + jac[2][2]));
    rep.scale = std::max(rep.scale, std::sqrt(frob));
  }
  return rep;
}

CurlIdentityReport curl_identity_check(const Field& u, double spacing) {
  if (!(spacing > 0.0)) throw PreconditionError("curl_identity_check: spacing must be positive");
  const auto& g = u.grid();
  double r_sup = 0.0;
  double z_lo = g.z_half();
  double z_hi = -g.z_half();
  bool any = false;
  for (std::size_t i = 0; i < g.nr(); ++i) {
    for (std::size_t j = 0; j < g.nz(); ++j) {
      if (u(i, j) != 0.0) {
        any = true;
        r_sup = std::max(r_sup, g.r(i) + g.hr());
        z_lo = std::min(z_lo, g.z(j) - g.hz());
        z_hi = std::max(z_hi, g.z(j) + g.hz());
      }
    }
  }
  if (!any) return {0.0, 0.0, 0.0, 0};
  r_sup = std::min(r_sup, g.r_max()) + 2.0 * spacing;
  z_lo = std::max(z_lo, -g.z_half()) - 2.0 * spacing;
  z_hi = std::min(z_hi, g.z_half()) + 2.0 * spacing;

  const auto nxy = static_cast<std::size_t>(std::ceil(2.0 * r_sup / spacing)) + 1;
  const auto nzc = static_cast<std::size_t>(std::ceil((z_hi - z_lo) / spacing)) + 1;
  constexpr double eps = 1e-6;
  double full = 0.0;
  double cd = 0.0;
  std::size_t used = 0;
  for (std::size_t a = 0; a < nxy; ++a) {
    const double x = -r_sup + spacing * static_cast<double>(a);
    for (std::size_t b = 0; b < nxy; ++b) {
      const double y = -r_sup + spacing * static_cast<double>(b);
      if (std::hypot(x, y) > r_sup) continue;
      used += nzc;
      for (std::size_t c = 0; c < nzc; ++c) {
        const Vec3 p{x, y, z_lo + spacing * static_cast<double>(c)};
        double d[3][3];  // d[i][j] = d_j U^i at the node
        for (int j = 0; j < 3; ++j) {
          Vec3 pa = p;
          Vec3 pb = p;
          pa[j] += eps;
          pb[j] -= eps;
          const Vec3 ua = field_or_zero(u, pa[0], pa[1], pa[2]);
          const Vec3 ub = field_or_zero(u, pb[0], pb[1], pb[2]);
          for (int i = 0; i < 3; ++i) d[i][j] = (ua[i] - ub[i]) / (2.0 * eps);
        }
        for (auto& row : d) {
          for (double v : row) full += v * v;
        }
        const double c1 = d[2][1] - d[1][2];
        const double c2 = d[0][2] - d[2][0];
        const double c3 = d[1][0] - d[0][1];
        const double dv = d[0][0] + d[1][1] + d[2][2];
        cd += c1 * c1 + c2 * c2 + c3 * c3 + dv * dv;
      }
    }
  }
  const double vol = spacing * spacing * spacing;
  full *= vol;
  cd *= vol;
  const double mismatch = full > 0.0 ? std::abs(full - cd) / full : 0.0;
  return {full, cd, mismatch, used};
}

}  // namespace curlgap
