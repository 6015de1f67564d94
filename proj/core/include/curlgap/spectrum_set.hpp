#pragma once

#include <optional>
#include <string>
#include <vector>

namespace curlgap {

struct Interval {
  double lo;
  double hi;

  friend bool operator==(const Interval&, const Interval&) = default;
};

// A finite union of isolated points, closed intervals and at most one
// half-line [tail, inf). Every constructor normalizes: components are sorted,
// pairwise disjoint, and no point lies inside an interval or the tail.
class SpectrumSet {
 public:
  SpectrumSet() = default;
  SpectrumSet(std::vector<double> points, std::vector<Interval> intervals, std::optional<double> tail);

  static SpectrumSet point(double x);
  static SpectrumSet interval(double lo, double hi);
  static SpectrumSet half_line(double start);

  const std::vector<double>& points() const { return points_; }
  const std::vector<Interval>& intervals() const { return intervals_; }
  const std::optional<double>& tail() const { return tail_; }

  bool empty() const { return points_.empty() && intervals_.empty() && !tail_; }
  std::optional<double> min() const;
  bool contains(double x) const;
  // Distance from x to the set; +inf for the empty set.
  double distance(double x) const;

  SpectrumSet unite(const SpectrumSet& other) const;

  friend bool operator==(const SpectrumSet&, const SpectrumSet&) = default;

 private:
  void normalize();

  std::vector<double> points_;
  std::vector<Interval> intervals_;
  std::optional<double> tail_;
};

// Exact set sum {x + y : x in a, y in b} within the finite representation.
SpectrumSet minkowski_sum(const SpectrumSet& a, const SpectrumSet& b);

// JSON object {"points":[...], "intervals":[[a,b],...], "tail": t|null}.
std::string to_json(const SpectrumSet& s);
SpectrumSet spectrum_from_json(const std::string& text);

}  // namespace curlgap
