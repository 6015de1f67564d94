#include "curlgap/spectrum_set.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "curlgap/errors.hpp"

namespace curlgap {

SpectrumSet::SpectrumSet(std::vector<double> points, std::vector<Interval> intervals, std::optional<double> tail)
    : points_(std::move(points)), intervals_(std::move(intervals)), tail_(tail) {
  normalize();
}

SpectrumSet SpectrumSet::point(double x) { return SpectrumSet({x}, {}, std::nullopt); }

SpectrumSet SpectrumSet::interval(double lo, double hi) { return SpectrumSet({}, {{lo, hi}}, std::nullopt); }

SpectrumSet SpectrumSet::half_line(double start) { return SpectrumSet({}, {}, start); }

void SpectrumSet::normalize() {
  for (double p : points_) {
    if (!std::isfinite(p)) throw PreconditionError("SpectrumSet: non-finite point");
  }
  if (tail_ && !std::isfinite(*tail_)) throw PreconditionError("SpectrumSet: non-finite tail");

  std::vector<Interval> raw;
  raw.reserve(intervals_.size());
  for (const auto& iv : intervals_) {
    if (!std::isfinite(iv.lo) || !std::isfinite(iv.hi)) throw PreconditionError("SpectrumSet: non-finite interval");
    if (iv.lo > iv.hi) throw PreconditionError("SpectrumSet: interval with lo > hi");
    if (iv.lo == iv.hi) {
      points_.push_back(iv.lo);
    } else {
      raw.push_back(iv);
    }
  }
  std::sort(raw.begin(), raw.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });

  std::vector<Interval> merged;
  for (const auto& iv : raw) {
    if (!merged.empty() && iv.lo <= merged.back().hi) {
      merged.back().hi = std::max(merged.back().hi, iv.hi);
    } else {
      merged.push_back(iv);
    }
  }

  // The tail swallows every interval reaching it; walking down handles chains.
  if (tail_) {
    while (!merged.empty() && merged.back().hi >= *tail_) {
      tail_ = std::min(*tail_, merged.back().lo);
      merged.pop_back();
    }
  }
  intervals_ = std::move(merged);

  std::sort(points_.begin(), points_.end());
  points_.erase(std::unique(points_.begin(), points_.end()), points_.end());
  std::erase_if(points_, [this](double p) {
    if (tail_ && p >= *tail_) return true;
    auto it = std::upper_bound(intervals_.begin(), intervals_.end(), p,
                               [](double v, const Interval& iv) { return v < iv.lo; });
    if (it == intervals_.begin()) return false;
    --it;
    return p <= it->hi;
  });
}

std::optional<double> SpectrumSet::min() const {
  std::optional<double> m;
  auto take = [&m](double v) { m = m ? std::min(*m, v) : v; };
  if (!points_.empty()) take(points_.front());
  if (!intervals_.empty()) take(intervals_.front().lo);
  if (tail_) take(*tail_);
  return m;
}

bool SpectrumSet::contains(double x) const { return distance(x) == 0.0; }

double SpectrumSet::distance(double x) const {
  double d = std::numeric_limits<double>::infinity();
  for (double p : points_) d = std::min(d, std::abs(x - p));
  for (const auto& iv : intervals_) {
    if (x < iv.lo) {
      d = std::min(d, iv.lo - x);
    } else if (x > iv.hi) {
      d = std::min(d, x - iv.hi);
    } else {
      return 0.0;
    }
  }
  if (tail_) d = std::min(d, std::max(0.0, *tail_ - x));
  return d;
}

SpectrumSet SpectrumSet::unite(const SpectrumSet& other) const {
  std::vector<double> pts = points_;
  pts.insert(pts.end(), other.points_.begin(), other.points_.end());
  std::vector<Interval> ivs = intervals_;
  ivs.insert(ivs.end(), other.intervals_.begin(), other.intervals_.end());
  std::optional<double> t = tail_;
  if (other.tail_) t = t ? std::min(*t, *other.tail_) : *other.tail_;
  return SpectrumSet(std::move(pts), std::move(ivs), t);
}

SpectrumSet minkowski_sum(const SpectrumSet& a, const SpectrumSet& b) {
  if (a.empty() || b.empty()) return {};

  std::vector<double> pts;
  std::vector<Interval> ivs;
  std::optional<double> tail;
  auto add_tail = [&tail](double t) { tail = tail ? std::min(*tail, t) : t; };

  for (double p : a.points()) {
    for (double q : b.points()) pts.push_back(p + q);
    for (const auto& iv : b.intervals()) ivs.push_back({p + iv.lo, p + iv.hi});
    if (b.tail()) add_tail(p + *b.tail());
  }
  for (const auto& iv : a.intervals()) {
    for (double q : b.points()) ivs.push_back({iv.lo + q, iv.hi + q});
    for (const auto& jv : b.intervals()) ivs.push_back({iv.lo + jv.lo, iv.hi + jv.hi});
    if (b.tail()) add_tail(iv.lo + *b.tail());
  }
  if (a.tail()) {
    // a.tail + anything in b starts at a.tail + min(b)
    add_tail(*a.tail() + *b.min());
  }
  return SpectrumSet(std::move(pts), std::move(ivs), tail);
}

}  // namespace curlgap
