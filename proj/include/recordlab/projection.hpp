#pragma once

// Anchored-pair projection of square permutations, good/regular pairs,
// Petrov conditions and the inverse construction.

#include <cmath>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "recordlab/exact.hpp"
#include "recordlab/permutation.hpp"

namespace recordlab {

/// X is indexed by position (U = maximum, D = minimum); Y by value from the
/// bottom (L = left-to-right record, R = right-to-left record). Both are stored
/// as strings over their two-letter alphabets, index 0 = position/value 1.
struct AnchoredPair {
  std::string x;
  std::string y;
  int z0 = 1;

  int size() const { return static_cast<int>(x.size()); }

  bool well_formed() const {
    if (x.size() != y.size() || z0 < 1 || z0 > size()) return false;
    for (char c : x)
      if (c != 'U' && c != 'D') return false;
    for (char c : y)
      if (c != 'L' && c != 'R') return false;
    return true;
  }

  /// "DUDDD LLLRL 4"
  std::string str() const { return x + ' ' + y + ' ' + std::to_string(z0); }

  static AnchoredPair parse(const std::string& text) {
    std::istringstream in(text);
    AnchoredPair a;
    if (!(in >> a.x >> a.y >> a.z0) || !a.well_formed()) throw std::invalid_argument("bad anchored pair: " + text);
    return a;
  }

  friend bool operator==(const AnchoredPair&, const AnchoredPair&) = default;
  friend auto operator<=>(const AnchoredPair&, const AnchoredPair&) = default;
};

/// phi: record types of a square permutation. Points that are both maxima and
/// minima get D; points that are both left and right records get L.
inline AnchoredPair project(const Permutation& p) {
  const RecordClass rc = classify(p);
  if (rc.internal_count() != 0) throw std::invalid_argument("projection requires a square permutation");
  const int n = p.size();
  AnchoredPair a;
  a.x.assign(static_cast<std::size_t>(n), 'D');
  a.y.assign(static_cast<std::size_t>(n), 'L');
  for (int i = 1; i <= n; ++i) {
    const RecordFlags& f = rc(i);
    const bool is_min = f.ltr_min || f.rtl_min;
    const bool is_left = f.ltr_min || f.ltr_max;
    if (!is_min) a.x[i - 1] = 'U';
    if (!is_left) a.y[p(i) - 1] = 'R';
  }
  a.z0 = p.position_of(1);
  return a;
}

inline bool is_good(const AnchoredPair& a) {
  const int n = a.size();
  if (n == 0 || !a.well_formed()) return false;
  return a.x[0] == 'D' && a.x[n - 1] == 'D' && a.x[a.z0 - 1] == 'D' && a.y[0] == 'L' && a.y[n - 1] == 'L';
}

/// 2(n+2)4^(n-3).
inline ExactCount count_good(int n) {
  if (n < 3) throw std::invalid_argument("count_good requires n >= 3");
  return 2 * ExactCount(n + 2) * power(ExactCount(4), static_cast<unsigned>(n - 3));
}

/// Brute force over all 2^n * 2^n * n triples.
inline ExactCount count_good_brute_force(int n) {
  if (n < 1 || n > 12) throw std::invalid_argument("brute-force good-pair count limited to n <= 12");
  const std::uint32_t full = (1u << n) - 1;
  const std::uint32_t ends = 1u | (1u << (n - 1));
  std::uint64_t xs = 0, ys = 0;
  std::vector<std::uint64_t> per_anchor(static_cast<std::size_t>(n), 0);
  // Bit set = D in X, L in Y.
  for (std::uint32_t xm = 0; xm <= full; ++xm) {
    if ((xm & ends) != ends) continue;
    for (int z = 0; z < n; ++z)
      if (xm >> z & 1u) ++per_anchor[z];
  }
  for (std::uint32_t ym = 0; ym <= full; ++ym)
    if ((ym & ends) == ends) ++ys;
  for (auto c : per_anchor) xs += c;
  return ExactCount(xs) * ys;
}

// ---------------------------------------------------------------------------
// Petrov conditions

namespace detail {

// Each check scans pairs (i, j), i < j. When the running slack against the
// threshold is s and the compared function moves by at most `lip` per step
// while the threshold is nondecreasing in |i-j|, no violation can occur in the
// next floor(s / lip) offsets, so those are skipped.
template <class F, class T>
bool pair_check(int lo, int hi, double min_gap_excl, double max_gap_excl, F value, T threshold, double lip) {
  for (int i = lo; i <= hi; ++i) {
    int j = i + 1;
    while (j <= hi) {
      const double d = j - i;
      if (d >= max_gap_excl) break;
      if (d <= min_gap_excl) {
        j = static_cast<int>(std::floor(i + min_gap_excl)) + 1;
        continue;
      }
      const double dev = std::fabs(value(j) - value(i));
      const double thr = threshold(d);
      if (!(dev < thr)) return false;
      const double slack = thr - dev;
      int step = 1;
      if (lip > 0) step = std::max(1, static_cast<int>(std::floor(slack / lip)));
      j += step;
    }
  }
  return true;
}

}  // namespace detail

/// Outcome of the four Petrov inequalities for one label. ct(i) counts the
/// label in positions 1..i; pos(i) is the position of its i-th occurrence.
///   count_local:     |ct(i)-ct(j)-(i-j)/2| < n^.4        for |i-j| < n^.6
///   count_global:    |ct(i)-ct(j)-(i-j)/2| < |i-j|^.6/2  for |i-j| > n^.3
///   position_local:  |pos(i)-pos(j)-2(i-j)| < n^.4       for |i-j| < n^.6
///   position_global: |pos(i)-pos(j)-2(i-j)| < 2|i-j|^.6  for |i-j| > n^.3
/// The position conditions range over i, j <= ct(n).
struct PetrovReport {
  bool count_local = true;
  bool count_global = true;
  bool position_local = true;
  bool position_global = true;

  bool all() const { return count_local && count_global && position_local && position_global; }
};

inline PetrovReport petrov_report(const std::string& seq, char label) {
  PetrovReport r;
  const int n = static_cast<int>(seq.size());
  if (n == 0) return r;
  const double nd = n;
  const double small_window = std::pow(nd, 0.6);
  const double large_window = std::pow(nd, 0.3);
  const double band = std::pow(nd, 0.4);
  std::vector<int> ct(static_cast<std::size_t>(n) + 1, 0);
  std::vector<int> pos;
  for (int i = 1; i <= n; ++i) {
    ct[i] = ct[i - 1] + (seq[i - 1] == label ? 1 : 0);
    if (seq[i - 1] == label) pos.push_back(i);
  }
  const int total = ct[n];
  const double inf = std::numeric_limits<double>::infinity();

  // ct(i) - i/2 moves by exactly 1/2 per step.
  auto count_dev = [&](int i) { return ct[i] - 0.5 * i; };
  r.count_local = detail::pair_check(1, n, 0.0, small_window, count_dev, [&](double) { return band; }, 0.5);
  r.count_global = detail::pair_check(1, n, large_window, inf, count_dev,
                                      [](double d) { return 0.5 * std::pow(d, 0.6); }, 0.5);

  // pos(i) - 2i has unbounded increments, so no skipping.
  auto pos_dev = [&](int i) { return static_cast<double>(pos[i - 1]) - 2.0 * i; };
  if (total >= 2) {
    r.position_local = detail::pair_check(1, total, 0.0, small_window, pos_dev, [&](double) { return band; }, 0.0);
    r.position_global = detail::pair_check(1, total, large_window, inf, pos_dev,
                                           [](double d) { return 2.0 * std::pow(d, 0.6); }, 0.0);
  }
  return r;
}

inline bool petrov_labels(const std::string& seq, char label) { return petrov_report(seq, label).all(); }

inline bool petrov(const AnchoredPair& a) {
  return petrov_labels(a.x, 'D') && petrov_labels(a.x, 'U') && petrov_labels(a.y, 'L') &&
         petrov_labels(a.y, 'R');
}

struct RegularityParams {
  long delta_n = 0;
  double band_constant = 3.0;

  /// max(ceil(sqrt(n k)), ceil(n^0.9)); k = 0 gives ceil(n^0.9).
  static RegularityParams defaults(int n, int k = 0) {
    RegularityParams p;
    const auto a = static_cast<long>(std::ceil(std::sqrt(static_cast<double>(n) * k)));
    const auto b = static_cast<long>(std::ceil(std::pow(static_cast<double>(n), 0.9)));
    p.delta_n = std::max(a, b);
    return p;
  }
};

struct RegularityClass {
  bool regular = false;
  int z0 = 0;  // meaningful only when regular
  bool petrov = false;
  bool anchor_in_window = false;
};

inline RegularityClass classify_regularity(const Permutation& p, const RegularityParams& params) {
  const AnchoredPair a = project(p);
  const int n = p.size();
  RegularityClass rc;
  rc.anchor_in_window = a.z0 > params.delta_n && a.z0 < n - params.delta_n;
  rc.petrov = petrov(a);
  rc.regular = rc.anchor_in_window && rc.petrov;
  if (rc.regular) rc.z0 = a.z0;
  return rc;
}

// ---------------------------------------------------------------------------
// Reconstruction

/// Rebuilds the square permutation with projection `a`, or nullopt when `a` is
/// not in the image. Positions are swept left to right:
///   D at or before z0  -> left-to-right minimum, value from the descending run
///                         of the smallest L labels;
///   D after z0         -> right-to-left minimum, value = min of unused values;
///   U before n appears -> left-to-right maximum, value = least L label above
///                         the prefix maximum;
///   U after n appears  -> right-to-left maximum, value = max of unused values.
/// Every success is confirmed by re-projection.
inline std::optional<Permutation> reconstruct(const AnchoredPair& a) {
  if (!is_good(a)) throw std::invalid_argument("reconstruct requires a good anchored pair");
  const int n = a.size();
  std::vector<int> l_values;
  for (int v = 1; v <= n; ++v)
    if (a.y[v - 1] == 'L') l_values.push_back(v);
  int minima_left = 0;
  for (int i = 1; i <= a.z0; ++i)
    if (a.x[i - 1] == 'D') ++minima_left;
  if (minima_left > static_cast<int>(l_values.size())) return std::nullopt;

  std::vector<int> out(static_cast<std::size_t>(n), 0);
  std::vector<char> used(static_cast<std::size_t>(n) + 2, 0);
  int next_left_min = minima_left - 1;  // index into l_values, descending
  int low = 1, high = n;                // pointers for min/max of unused values
  std::size_t l_ptr = 0;                // least L value above the prefix maximum
  int prefix_max = 0;
  bool top_placed = false;

  auto take = [&](int i, int v) {
    if (v < 1 || v > n || used[v]) return false;
    used[v] = 1;
    out[i - 1] = v;
    prefix_max = std::max(prefix_max, v);
    if (v == n) top_placed = true;
    return true;
  };

  for (int i = 1; i <= n; ++i) {
    int v = 0;
    if (a.x[i - 1] == 'D') {
      if (i <= a.z0) {
        if (next_left_min < 0) return std::nullopt;
        v = l_values[static_cast<std::size_t>(next_left_min--)];
      } else {
        while (low <= n && used[low]) ++low;
        v = low;
      }
    } else if (!top_placed) {
      while (l_ptr < l_values.size() && l_values[l_ptr] <= prefix_max) ++l_ptr;
      if (l_ptr == l_values.size()) return std::nullopt;
      v = l_values[l_ptr];
    } else {
      while (high >= 1 && used[high]) --high;
      v = high;
    }
    if (!take(i, v)) return std::nullopt;
  }
  Permutation p = make_unchecked(std::move(out));
  if (!is_square(p) || project(p) != a) return std::nullopt;
  return p;
}

}  // namespace recordlab
