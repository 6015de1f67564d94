#pragma once

#include <cstddef>
#include <vector>

namespace curlgap::bessel {

// Largest arguments accepted before an OverflowGuardError is raised. K1 leaves
// the normal double range shortly after kMaxKArgument.
inline constexpr double kMaxJArgument = 1.0e4;
inline constexpr double kMaxKArgument = 700.0;

// Order-one Bessel functions and derivatives. j1/j1_prime accept x >= 0,
// k1/k1_prime require x > 0 (DomainError otherwise).
double j1(double x);
double j1_prime(double x);
double k1(double x);
double k1_prime(double x);

// First n positive zeros of J1 and of J1', strictly increasing.
std::vector<double> j1_zeros(std::size_t n);
std::vector<double> j1_prime_zeros(std::size_t n);

// alpha(x) = J1(x) / (x J1'(x)). Throws PoleError within 1e-12 of a zero of J1'.
double alpha(double x);

// beta(x) = K1(x) / (x K1'(x)), negative and increasing from -1 to 0.
double beta(double x);

// Immutable table of the leading zeros, shared process-wide.
struct BesselZeroTable {
  std::vector<double> j;   // zeros of J1
  std::vector<double> jp;  // zeros of J1'

  std::size_t count() const { return j.size(); }

  static BesselZeroTable compute(std::size_t n);
  static const BesselZeroTable& standard();  // 32 zeros of each kind
};

}  // namespace curlgap::bessel
