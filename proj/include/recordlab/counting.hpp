#pragma once

// Exact and asymptotic enumeration of square, almost square and
// 321-avoiding-with-internal-points permutations.

#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "recordlab/dyck321.hpp"
#include "recordlab/exact.hpp"
#include "recordlab/excursion.hpp"
#include "recordlab/parallel.hpp"
#include "recordlab/permutation.hpp"
#include "recordlab/projection.hpp"

namespace recordlab {

/// |Sq(n)| = 2(n+2)4^{n-3} - 4(2n-5) C(2n-6, n-3).
inline ExactCount count_sq_exact(int n) {
  if (n < 4) throw std::invalid_argument("closed form for |Sq(n)| requires n >= 4");
  return count_good(n) - 4 * ExactCount(2 * n - 5) * binomial(2 * n - 6, n - 3);
}

inline ExactCount catalan(int n) {
  if (n < 0) throw std::invalid_argument("catalan requires n >= 0");
  return binomial(2 * n, n) / (n + 1);
}

namespace detail {

// Positions are filled left to right. A value that is neither a left-to-right
// maximum nor minimum must be a right-to-left record, i.e. above or below every
// value still unused; any other choice creates an internal point.
template <class F>
void square_backtrack(std::vector<int>& prefix, std::vector<char>& used, int n, int lo, int hi, F& f) {
  const int placed = static_cast<int>(prefix.size());
  if (placed == n) {
    f(std::span<const int>(prefix));
    return;
  }
  int unused_min = 1, unused_max = n;
  while (unused_min <= n && used[unused_min]) ++unused_min;
  while (unused_max >= 1 && used[unused_max]) --unused_max;
  for (int v = 1; v <= n; ++v) {
    if (used[v]) continue;
    const bool ltr = placed == 0 || v > hi || v < lo;
    if (!ltr) {
      // Remaining values after v is placed.
      const bool above_rest = v >= unused_max;
      const bool below_rest = v <= unused_min;
      if (!above_rest && !below_rest) continue;
    }
    used[v] = 1;
    prefix.push_back(v);
    square_backtrack(prefix, used, n, placed == 0 ? v : std::min(lo, v), placed == 0 ? v : std::max(hi, v), f);
    prefix.pop_back();
    used[v] = 0;
  }
}

}  // namespace detail

/// Visits every square permutation of size n exactly once (lexicographic).
template <class F>
void for_each_square(int n, F&& f) {
  if (n < 1) return;
  std::vector<int> prefix;
  prefix.reserve(static_cast<std::size_t>(n));
  std::vector<char> used(static_cast<std::size_t>(n) + 1, 0);
  detail::square_backtrack(prefix, used, n, 0, 0, f);
}

inline std::vector<Permutation> enumerate_sq(int n) {
  std::vector<Permutation> out;
  for_each_square(n, [&](std::span<const int> v) { out.push_back(make_unchecked({v.begin(), v.end()})); });
  return out;
}

inline std::vector<Permutation> enumerate_av321(int n) {
  std::vector<Permutation> out;
  for_each_permutation(n, [&](std::span<const int> v) {
    if (avoids_321(v)) out.push_back(make_unchecked({v.begin(), v.end()}));
  });
  return out;
}

/// Histograms over S_m by internal-point count: all permutations, and those
/// whose exterior avoids 321. Entry k counts permutations with k internal
/// points (k <= max_k).
struct InternalHistogram {
  std::vector<ExactCount> all;
  std::vector<ExactCount> av321;
};

inline InternalHistogram internal_histogram(int m, int max_k) {
  std::vector<std::uint64_t> all(static_cast<std::size_t>(max_k) + 1, 0), av(static_cast<std::size_t>(max_k) + 1, 0);
  for_each_permutation(m, [&](std::span<const int> v) {
    const int c = internal_count(v);
    if (c > max_k) return;
    ++all[c];
    const Permutation p = make_unchecked({v.begin(), v.end()});
    if (avoids_321(c == 0 ? p : exterior(p))) ++av[c];
  });
  InternalHistogram h;
  for (int k = 0; k <= max_k; ++k) {
    h.all.emplace_back(all[k]);
    h.av321.emplace_back(av[k]);
  }
  return h;
}

/// |ASq(n,k)| by filtering S_{n+k} on internal_count = k.
inline ExactCount count_asq_filter(int n, int k) {
  if (n < 1 || k < 0) throw std::invalid_argument("count_asq_filter: bad size");
  return internal_histogram(n + k, k).all[static_cast<std::size_t>(k)];
}

/// |ASq(n,k)| = sum over square s of |J(s,k)| / k!.
inline ExactCount count_asq_bumping(int n, int k, unsigned workers = 1) {
  if (n < 1 || k < 0) throw std::invalid_argument("count_asq_bumping: bad size");
  const auto squares = enumerate_sq(n);
  const auto parts = parallel_map(squares.size(), workers,
                                  [&](std::size_t i) { return count_internal_sequences(squares[i], k); });
  ExactCount total = 0;
  for (const auto& c : parts) total += c;
  const ExactCount f = factorial(static_cast<unsigned>(k));
  if (total % f != 0) throw std::logic_error("internal sequence total not divisible by k!");
  return total / f;
}

struct DualCount {
  ExactCount filter;
  ExactCount bumping;
  bool agree() const { return filter == bumping; }
};

inline DualCount count_asq_exact(int n, int k) { return {count_asq_filter(n, k), count_asq_bumping(n, k)}; }

inline ExactCount count_asq_av321_filter(int n, int k) {
  if (n < 1 || k < 0) throw std::invalid_argument("count_asq_av321_filter: bad size");
  return internal_histogram(n + k, k).av321[static_cast<std::size_t>(k)];
}

inline ExactCount count_asq_av321_bumping(int n, int k, unsigned workers = 1) {
  const auto taus = enumerate_av321(n);
  const auto parts =
      parallel_map(taus.size(), workers, [&](std::size_t i) { return count_internal_sequences(taus[i], k); });
  ExactCount total = 0;
  for (const auto& c : parts) total += c;
  const ExactCount f = factorial(static_cast<unsigned>(k));
  if (total % f != 0) throw std::logic_error("internal sequence total not divisible by k!");
  return total / f;
}

inline DualCount count_asq_av321_exact(int n, int k) {
  return {count_asq_av321_filter(n, k), count_asq_av321_bumping(n, k)};
}

// ---------------------------------------------------------------------------
// Asymptotic evaluators

struct AsymptoticEstimate {
  double log_value = 0;
  const char* formula = "";
  double value() const { return std::exp(log_value); }
};

/// log( k! 2^{k+1} n^{2k+1} 4^{n-3} / (2k+1)! ), via lgamma.
inline double log_asq_asymptotic(double n, double k) {
  return std::lgamma(k + 1) + (k + 1) * std::numbers::ln2 + (2 * k + 1) * std::log(n) +
         (n - 3) * 2 * std::numbers::ln2 - std::lgamma(2 * k + 2);
}

inline AsymptoticEstimate asq_asymptotic(double n, double k) {
  return {log_asq_asymptotic(n, k), "k! 2^(k+1) n^(2k+1) 4^(n-3) / (2k+1)!"};
}

/// log of the Catalan number via lgamma.
inline double log_catalan(double n) { return std::lgamma(2 * n + 1) - 2 * std::lgamma(n + 1) - std::log(n + 1); }

/// (2n)^{3k/2} / k! * c_n * E[A^k].
inline AsymptoticEstimate asq_av321_asymptotic(double n, int k) {
  const double lv = 1.5 * k * std::log(2 * n) - std::lgamma(k + 1.0) + log_catalan(n) +
                    std::log(excursion_area_moment(k));
  return {lv, "(2n)^(3k/2) / k! * c_n * E[A^k]"};
}

struct RegionBounds {
  double lower = 0;
  double upper = 0;
};

/// 2(z0 - c n^0.6)(n - z0 - c n^0.6) and 2(z0 + c n^0.6)(n - z0 + c n^0.6).
inline RegionBounds insertion_region_bounds(int n, int z0, const RegularityParams& params) {
  if (!(z0 > params.delta_n && z0 < n - params.delta_n))
    throw std::invalid_argument("anchor outside the window (delta_n, n - delta_n)");
  const double w = params.band_constant * std::pow(static_cast<double>(n), 0.6);
  return {2.0 * (z0 - w) * (n - z0 - w), 2.0 * (z0 + w) * (n - z0 + w)};
}

}  // namespace recordlab
