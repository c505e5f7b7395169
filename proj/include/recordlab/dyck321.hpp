#pragma once

// Dyck paths, the Billey-Jockusch-Stanley correspondence with 321-avoiding
// permutations, and the displacement statistics built on it.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "recordlab/exact.hpp"
#include "recordlab/permutation.hpp"
#include "recordlab/rng.hpp"

namespace recordlab {

/// True iff no i < j < l with p(i) > p(j) > p(l): no point has a larger value
/// on its left and a smaller one on its right.
inline bool avoids_321(std::span<const int> v) {
  const std::size_t n = v.size();
  if (n < 3) return true;
  std::vector<int> suf_min(n);
  suf_min[n - 1] = v[n - 1];
  for (std::size_t r = n - 1; r-- > 0;) suf_min[r] = std::min(suf_min[r + 1], v[r]);
  int pre_max = v[0];
  for (std::size_t j = 1; j + 1 < n; ++j) {
    if (pre_max > v[j] && suf_min[j + 1] < v[j]) return false;
    pre_max = std::max(pre_max, v[j]);
  }
  return true;
}

inline bool avoids_321(const Permutation& p) { return avoids_321(p.values()); }

/// Path of +1/-1 steps of semilength n that never goes below zero.
class DyckPath {
 public:
  DyckPath() = default;

  explicit DyckPath(std::vector<std::int8_t> steps) : steps_(std::move(steps)) {
    if (steps_.size() % 2 != 0) throw std::invalid_argument("Dyck path must have even length");
    long h = 0;
    heights_.assign(steps_.size() + 1, 0);
    for (std::size_t t = 0; t < steps_.size(); ++t) {
      if (steps_[t] != 1 && steps_[t] != -1) throw std::invalid_argument("Dyck steps must be +1 or -1");
      h += steps_[t];
      if (h < 0) throw std::invalid_argument("Dyck path goes below zero");
      heights_[t + 1] = static_cast<int>(h);
    }
    if (h != 0) throw std::invalid_argument("Dyck path must end at height zero");
  }

  /// From a word over {U, D}.
  static DyckPath parse(const std::string& word) {
    std::vector<std::int8_t> s;
    for (char c : word) {
      if (c == 'U') s.push_back(1);
      else if (c == 'D') s.push_back(-1);
      else throw std::invalid_argument("Dyck word must use U and D");
    }
    return DyckPath(std::move(s));
  }

  int semilength() const { return static_cast<int>(steps_.size() / 2); }
  std::span<const std::int8_t> steps() const { return steps_; }
  /// Height after t steps, 0 <= t <= 2n.
  int height(int t) const { return heights_[static_cast<std::size_t>(t)]; }

  std::string str() const {
    std::string s;
    for (auto st : steps_) s += st > 0 ? 'U' : 'D';
    return s;
  }

  friend bool operator==(const DyckPath& a, const DyckPath& b) { return a.steps_ == b.steps_; }
  friend auto operator<=>(const DyckPath& a, const DyckPath& b) { return a.steps_ <=> b.steps_; }

 private:
  std::vector<std::int8_t> steps_;
  std::vector<int> heights_{0};
};

/// Left-to-right maxima m_1 < ... < m_r at positions p_1 < ... < p_r map to
/// U^{m_1} D^{p_2-p_1} U^{m_2-m_1} ... U^{m_r-m_{r-1}} D^{n+1-p_r}.
inline DyckPath bjs_to_path(const Permutation& p) {
  if (!avoids_321(p)) throw std::invalid_argument("permutation contains 321");
  const int n = p.size();
  std::vector<std::int8_t> steps;
  steps.reserve(static_cast<std::size_t>(2 * n));
  int prev_value = 0, prev_pos = 0;
  for (int i = 1; i <= n; ++i) {
    if (p(i) <= prev_value) continue;
    if (prev_pos) steps.insert(steps.end(), static_cast<std::size_t>(i - prev_pos), -1);
    steps.insert(steps.end(), static_cast<std::size_t>(p(i) - prev_value), 1);
    prev_value = p(i);
    prev_pos = i;
  }
  if (n) steps.insert(steps.end(), static_cast<std::size_t>(n + 1 - prev_pos), -1);
  return DyckPath(std::move(steps));
}

/// Inverse of bjs_to_path: each (U-run, D-run) pair fixes one left-to-right
/// maximum; the remaining values fill the remaining positions increasingly.
inline Permutation bjs_to_perm(const DyckPath& d) {
  const int n = d.semilength();
  const auto s = d.steps();
  std::vector<int> out(static_cast<std::size_t>(n), 0);
  std::vector<char> used(static_cast<std::size_t>(n) + 1, 0);
  int value = 0, pos = 1;
  std::size_t t = 0;
  while (t < s.size()) {
    int up = 0, down = 0;
    while (t < s.size() && s[t] > 0) { ++up; ++t; }
    while (t < s.size() && s[t] < 0) { ++down; ++t; }
    value += up;
    if (pos > n || value > n) throw std::invalid_argument("not a Dyck path");
    out[pos - 1] = value;
    used[value] = 1;
    pos += down;
  }
  int next = 1;
  for (int i = 1; i <= n; ++i) {
    if (out[i - 1]) continue;
    while (used[next]) ++next;
    out[i - 1] = next;
    used[next] = 1;
  }
  return Permutation(std::move(out));
}

/// Uniform Dyck path: shuffle n up-steps and n+1 down-steps, rotate to start
/// just after the first global minimum of the prefix sums, drop the final
/// down-step.
inline DyckPath uniform_dyck(int n, RngStream& rng) {
  if (n < 0) throw std::invalid_argument("semilength must be nonnegative");
  const std::size_t len = static_cast<std::size_t>(2 * n + 1);
  std::vector<std::int8_t> w(len, -1);
  std::fill(w.begin(), w.begin() + n, 1);
  for (std::size_t i = len - 1; i > 0; --i) std::swap(w[i], w[rng.below(i + 1)]);
  long h = 0, best = 0;
  std::size_t start = 0;
  for (std::size_t t = 0; t < len; ++t) {
    h += w[t];
    if (h < best) {
      best = h;
      start = t + 1;
    }
  }
  std::vector<std::int8_t> steps;
  steps.reserve(len - 1);
  for (std::size_t t = 0; t + 1 < len; ++t) steps.push_back(w[(start + t) % len]);
  return DyckPath(std::move(steps));
}

// ---------------------------------------------------------------------------
// Path statistics

/// Sum of heights at even times 2, 4, ..., 2n.
inline ExactCount area(const DyckPath& d) {
  std::int64_t a = 0;
  for (int j = 1; j <= d.semilength(); ++j) a += d.height(2 * j);
  return a;
}

inline std::int64_t area_i64(const DyckPath& d) {
  std::int64_t a = 0;
  for (int j = 1; j <= d.semilength(); ++j) a += d.height(2 * j);
  return a;
}

/// area / (n sqrt(2n)); the Riemann sum of the path rescaled to [0,1].
inline double normalized_area(const DyckPath& d) {
  const double n = d.semilength();
  if (n == 0) return 0.0;
  return static_cast<double>(area_i64(d)) / (n * std::sqrt(2.0 * n));
}

/// M = max over 1 <= j <= n of the height at time 2j.
inline int max_height(const DyckPath& d) {
  int m = 0;
  for (int j = 1; j <= d.semilength(); ++j) m = std::max(m, d.height(2 * j));
  return m;
}

// ---------------------------------------------------------------------------
// Records of 321-avoiding permutations

struct Records321 {
  std::vector<int> plus;   // E+: left-to-right maxima, ascending
  std::vector<int> minus;  // E-: the complement, ascending
};

inline Records321 records_321(const Permutation& p) {
  Records321 r;
  int hi = 0;
  for (int i = 1; i <= p.size(); ++i) {
    if (p(i) > hi) {
      hi = p(i);
      r.plus.push_back(i);
    } else {
      r.minus.push_back(i);
    }
  }
  return r;
}

/// i+ and i- for every index (1-based; entry 0 unused).
struct NeighborRecords {
  std::vector<int> plus;
  std::vector<int> minus;
};

inline NeighborRecords neighbor_records(const Permutation& p) {
  const int n = p.size();
  NeighborRecords nr;
  nr.plus.assign(static_cast<std::size_t>(n) + 1, 0);
  nr.minus.assign(static_cast<std::size_t>(n) + 1, n);
  std::vector<char> in_plus(static_cast<std::size_t>(n) + 1, 0);
  int hi = 0;
  for (int i = 1; i <= n; ++i) {
    if (p(i) > hi) {
      hi = p(i);
      in_plus[i] = 1;
    }
  }
  int last = 0;
  for (int i = 1; i <= n; ++i) {
    if (in_plus[i]) last = i;
    nr.plus[i] = last;
  }
  int next = n;
  for (int i = n; i >= 1; --i) {
    if (!in_plus[i]) next = i;
    nr.minus[i] = p(i) == i ? i : next;
  }
  return nr;
}

inline int i_plus(const Permutation& p, int i) { return neighbor_records(p).plus[i]; }
inline int i_minus(const Permutation& p, int i) { return neighbor_records(p).minus[i]; }

// ---------------------------------------------------------------------------
// Fluctuation process

/// Right-continuous step function F on [0,1] with value values[i] on
/// [i/N, (i+1)/N), N = values.size().
struct FluctuationPath {
  int n = 0;  // external points
  int k = 0;  // internal points
  std::vector<double> values;

  double operator()(double t) const {
    if (values.empty()) return 0.0;
    auto i = static_cast<std::size_t>(std::floor(t * static_cast<double>(values.size())));
    if (i >= values.size()) i = values.size() - 1;
    return values[i];
  }

  double integral() const {
    double s = 0;
    for (double v : values) s += v;
    return values.empty() ? 0.0 : s / static_cast<double>(values.size());
  }

  double sup() const {
    double m = 0;
    for (double v : values) m = std::max(m, v);
    return m;
  }
};

/// F(t) = |p(s(t)) - s(t)| / sqrt(2N) with N = |p| and s(t) the last external
/// position at or before floor(N t) (position 0 with p(0) = 0 counts).
/// k_context = 0 requires p to avoid 321; k_context > 0 requires exactly
/// k_context internal points and a 321-avoiding exterior.
inline FluctuationPath fluctuation(const Permutation& p, int k_context) {
  const int size = p.size();
  const RecordClass rc = classify(p);
  if (k_context == 0) {
    if (!avoids_321(p)) throw std::invalid_argument("fluctuation: permutation contains 321");
  } else {
    if (rc.internal_count() != k_context || !avoids_321(exterior(p)))
      throw std::invalid_argument("fluctuation: permutation not in ASq(Av(321), k)");
  }
  FluctuationPath f;
  f.k = k_context;
  f.n = size - k_context;
  f.values.assign(static_cast<std::size_t>(size), 0.0);
  const double scale = 1.0 / std::sqrt(2.0 * size);
  int s = 0;
  for (int i = 0; i < size; ++i) {
    if (i >= 1 && rc(i).external()) s = i;
    const int value = s == 0 ? 0 : p(s);
    f.values[static_cast<std::size_t>(i)] = std::abs(value - s) * scale;
  }
  return f;
}

inline double integral_F(const Permutation& p, int k_context) { return fluctuation(p, k_context).integral(); }

// ---------------------------------------------------------------------------
// Inequality checks against the coupled Dyck path

struct FluxReport {
  long max_plus = 0;   // over left-to-right maxima: |p(j) - j - h(2j)|
  long max_minus = 0;  // over right-to-left minima: |p(j) - j + h(2j)|
  double bound = 0;    // 10 n^0.4
  bool pass = true;
};

inline FluxReport flux_check(const Permutation& p, const DyckPath& d) {
  const RecordClass rc = classify(p);
  FluxReport r;
  r.bound = 10.0 * std::pow(static_cast<double>(p.size()), 0.4);
  for (int j = 1; j <= p.size(); ++j) {
    const long disp = p(j) - j;
    const long h = d.height(2 * j);
    if (rc(j).ltr_max) r.max_plus = std::max(r.max_plus, std::labs(disp - h));
    if (rc(j).rtl_min) r.max_minus = std::max(r.max_minus, std::labs(disp + h));
  }
  r.pass = r.max_plus <= r.bound && r.max_minus <= r.bound;
  return r;
}

inline FluxReport flux_check(const Permutation& p) { return flux_check(p, bjs_to_path(p)); }

/// D = max |p(j) - j|.
inline int max_displacement(const Permutation& p) {
  int d = 0;
  for (int j = 1; j <= p.size(); ++j) d = std::max(d, std::abs(p(j) - j));
  return d;
}

struct SandwichReport {
  int plus_gap = 0;     // max_i | |p(i+) - i+| - |p(i) - i| |
  int minus_gap = 0;    // same with i-
  int spacing = 0;      // max_i max(i - i+, i- - i)
};

inline SandwichReport sandwich_check(const Permutation& p) {
  const NeighborRecords nr = neighbor_records(p);
  SandwichReport r;
  for (int i = 1; i <= p.size(); ++i) {
    const int here = std::abs(p(i) - i);
    const int ip = nr.plus[i], im = nr.minus[i];
    r.plus_gap = std::max(r.plus_gap, std::abs(std::abs(p(ip) - ip) - here));
    r.minus_gap = std::max(r.minus_gap, std::abs(std::abs(p(im) - im) - here));
    r.spacing = std::max({r.spacing, i - ip, im - i});
  }
  return r;
}

/// Sum over i of p(i+) - p(i-), the interval-count formula for |I(p)|. It is
/// only approximately equal to the true count.
inline std::int64_t interval_internal_estimate(const Permutation& p) {
  const NeighborRecords nr = neighbor_records(p);
  std::int64_t s = 0;
  for (int i = 1; i <= p.size(); ++i) s += p(nr.plus[i]) - p(nr.minus[i]);
  return s;
}

}  // namespace recordlab
