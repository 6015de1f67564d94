#include "curlgap/bessel.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "curlgap/errors.hpp"

// J1, J0, K1, K0 come from the C++17 mathematical special functions in
// libstdc++ (series / Steed continued fraction for J, Temme's method for K).
// Derivatives use the order-lowering recurrences J1' = J0 - J1/x and
// K1' = -K0 - K1/x.

namespace curlgap::bessel {
namespace {

void check_j_argument(double x, const char* fn) {
  if (!(x >= 0.0)) throw DomainError(std::string(fn) + ": argument must be >= 0");
  if (x > kMaxJArgument) throw OverflowGuardError(std::string(fn) + ": argument beyond implemented range");
}

void check_k_argument(double x, const char* fn) {
  if (!(x > 0.0)) throw DomainError(std::string(fn) + ": argument must be > 0");
  if (x > kMaxKArgument) throw OverflowGuardError(std::string(fn) + ": argument beyond implemented range");
}

double bisect_root(const std::function<double(double)>& f, double lo, double hi) {
  double flo = f(lo);
  for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
    const double mid = 0.5 * (lo + hi);
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

std::vector<double> scan_zeros(const std::function<double(double)>& f, std::size_t n, double start) {
  std::vector<double> zeros;
  zeros.reserve(n);
  constexpr double step = 0.1;  // zeros of J1 and J1' are separated by > 1
  double x0 = start;
  double f0 = f(x0);
  while (zeros.size() < n) {
    const double x1 = x0 + step;
    const double f1 = f(x1);
    if ((f0 < 0.0) != (f1 < 0.0)) zeros.push_back(bisect_root(f, x0, x1));
    x0 = x1;
    f0 = f1;
  }
  return zeros;
}

}  // namespace

double j1(double x) {
  check_j_argument(x, "j1");
  if (x == 0.0) return 0.0;
  return std::cyl_bessel_j(1.0, x);
}

double j1_prime(double x) {
  check_j_argument(x, "j1_prime");
  if (x < 1e-5) {
    const double x2 = x * x;
    return 0.5 - 3.0 * x2 / 16.0 + 5.0 * x2 * x2 / 384.0;
  }
  return std::cyl_bessel_j(0.0, x) - std::cyl_bessel_j(1.0, x) / x;
}

double k1(double x) {
  check_k_argument(x, "k1");
  return std::cyl_bessel_k(1.0, x);
}

double k1_prime(double x) {
  check_k_argument(x, "k1_prime");
  return -std::cyl_bessel_k(0.0, x) - std::cyl_bessel_k(1.0, x) / x;
}

std::vector<double> j1_zeros(std::size_t n) {
  if (n == 0) throw PreconditionError("j1_zeros: n must be >= 1");
  return scan_zeros([](double x) { return j1(x); }, n, 0.5);
}

std::vector<double> j1_prime_zeros(std::size_t n) {
  if (n == 0) throw PreconditionError("j1_prime_zeros: n must be >= 1");
  return scan_zeros([](double x) { return j1_prime(x); }, n, 0.5);
}

BesselZeroTable BesselZeroTable::compute(std::size_t n) {
  return BesselZeroTable{j1_zeros(n), j1_prime_zeros(n)};
}

const BesselZeroTable& BesselZeroTable::standard() {
  static const BesselZeroTable table = compute(32);
  return table;
}

double alpha(double x) {
  if (!(x > 0.0)) throw DomainError("alpha: argument must be > 0");
  const auto& jp = BesselZeroTable::standard().jp;
  if (x <= jp.back() + 1.0) {
    for (double z : jp) {
      if (std::abs(x - z) < 1e-12) throw PoleError("alpha: argument at a zero of J1'");
      if (z > x + 1.0) break;
    }
  }
  const double d = j1_prime(x);
  if (d == 0.0) throw PoleError("alpha: argument at a zero of J1'");
  if (x < 1e-5) {
    // J1(x)/(x J1'(x)) = 1 + x^2/4 + O(x^4)
    return 1.0 + x * x / 4.0;
  }
  return j1(x) / (x * d);
}

double beta(double x) {
  check_k_argument(x, "beta");
  // beta = K1 / (x K1') = -1 / (1 + x K0/K1)
  const double ratio = std::cyl_bessel_k(0.0, x) / std::cyl_bessel_k(1.0, x);
  return -1.0 / (1.0 + x * ratio);
}

}  // namespace curlgap::bessel
