#pragma once

// Exact reference computations used by several test binaries.

#include <algorithm>
#include <cmath>
#include <vector>

namespace recordlab::oracle {

/// E[a^j], j = 0..max_k, for a the normalized area of a uniform Dyck path of
/// semilength n: sum of heights at even times divided by n sqrt(2n).
///
/// Forward transfer over (time, height) carrying the partial sums of area^j
/// over all prefixes; extending by height h at an even time uses the
/// binomial expansion of (area + h)^j. Rows are rescaled each step since only
/// ratios matter.
inline std::vector<double> dyck_area_moments(int n, int max_k) {
  const double unit = 1.0 / (n * std::sqrt(2.0 * n));
  using Rows = std::vector<std::vector<double>>;
  Rows cur(max_k + 1, std::vector<double>(n + 2, 0.0)), next = cur;
  cur[0][0] = 1;
  std::vector<double> expanded(max_k + 1);
  for (int t = 1; t <= 2 * n; ++t) {
    const int hmax = std::min(t, 2 * n - t);
    for (auto& row : next) std::fill(row.begin(), row.end(), 0.0);
    for (int j = 0; j <= max_k; ++j)
      for (int h = 0; h <= hmax; ++h) next[j][h] = (h > 0 ? cur[j][h - 1] : 0.0) + cur[j][h + 1];
    if (t % 2 == 0) {
      for (int h = 1; h <= hmax; ++h) {
        const double a = h * unit;
        for (int j = 0; j <= max_k; ++j) {
          double s = 0, power = 1, binom = 1;
          for (int i = j; i >= 0; --i) {
            s += binom * power * next[i][h];
            power *= a;
            binom = binom * i / (j - i + 1);
          }
          expanded[j] = s;
        }
        for (int j = 0; j <= max_k; ++j) next[j][h] = expanded[j];
      }
    }
    const double scale = *std::max_element(next[0].begin(), next[0].begin() + hmax + 1);
    for (auto& row : next)
      for (double& x : row) x /= scale;
    std::swap(cur, next);
  }
  std::vector<double> m(max_k + 1);
  for (int j = 0; j <= max_k; ++j) m[j] = cur[j][0] / cur[0][0];
  return m;
}

}  // namespace recordlab::oracle
