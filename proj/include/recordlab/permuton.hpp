#pragma once

// Empirical permutons, the rectangle permuton mu^z, grid rectangle distance and
// the Beta(k+1,k+1) anchor law.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "recordlab/exact.hpp"
#include "recordlab/permutation.hpp"

namespace recordlab {

struct Rect {
  double x1 = 0, x2 = 1, y1 = 0, y2 = 1;

  void validate() const {
    if (!(0.0 <= x1 && x1 <= x2 && x2 <= 1.0 && 0.0 <= y1 && y1 <= y2 && y2 <= 1.0))
      throw std::invalid_argument("rectangle must satisfy 0 <= x1 <= x2 <= 1 and 0 <= y1 <= y2 <= 1");
  }
};

/// Rectangle measure from a cdf F(x, y) = mu([0,x] x [0,y]).
template <class M>
double measure_of(const M& m, const Rect& r) {
  return m.cdf(r.x2, r.y2) - m.cdf(r.x1, r.y2) - m.cdf(r.x2, r.y1) + m.cdf(r.x1, r.y1);
}

/// mu_sigma: each diagram cell carries mass 1/n spread uniformly.
/// The cdf is the bilinear interpolation of the cumulative count table,
/// which is exact because the density is constant on each cell.
class GridMeasure {
 public:
  explicit GridMeasure(const Permutation& p) : n_(p.size()), table_(static_cast<std::size_t>(n_ + 1) * (n_ + 1), 0) {
    for (int a = 1; a <= n_; ++a) {
      const int v = p(a);
      for (int b = 0; b <= n_; ++b) at(a, b) = at(a - 1, b) + (b >= v ? 1 : 0);
    }
  }

  int size() const { return n_; }

  /// Number of points in columns 1..a with value <= b.
  std::uint32_t cumulative(int a, int b) const { return table_[static_cast<std::size_t>(a) * (n_ + 1) + b]; }

  double cdf(double x, double y) const {
    x = std::clamp(x, 0.0, 1.0) * n_;
    y = std::clamp(y, 0.0, 1.0) * n_;
    const int a = std::min(static_cast<int>(x), n_ - 1);
    const int b = std::min(static_cast<int>(y), n_ - 1);
    const double fx = x - a, fy = y - b;
    const double c00 = cumulative(a, b), c10 = cumulative(a + 1, b), c01 = cumulative(a, b + 1),
                 c11 = cumulative(a + 1, b + 1);
    const double v = c00 * (1 - fx) * (1 - fy) + c10 * fx * (1 - fy) + c01 * (1 - fx) * fy + c11 * fx * fy;
    return v / n_;
  }

 private:
  std::uint32_t& at(int a, int b) { return table_[static_cast<std::size_t>(a) * (n_ + 1) + b]; }

  int n_;
  std::vector<std::uint32_t> table_;
};

inline double mu_sigma(const Permutation& p, const Rect& r) {
  r.validate();
  return measure_of(GridMeasure(p), r);
}

/// mu^z: half of Lebesgue measure of the x-projection on each side of the
/// rectangle with corners (0,z), (z,0), (1,1-z), (1-z,1).
class RectangleMeasureZ {
 public:
  explicit RectangleMeasureZ(double z) : z_(z) {
    if (!(z > 0.0 && z < 1.0)) throw std::invalid_argument("z must lie in (0,1)");
  }

  double z() const { return z_; }

  double measure(const Rect& r) const {
    // Segments y = s*x + c on x in [lo, hi].
    struct Seg {
      double s, c, lo, hi;
    };
    const double z = z_;
    const Seg segs[4] = {{-1, z, 0, z}, {1, z, 0, 1 - z}, {1, -z, z, 1}, {-1, 2 - z, 1 - z, 1}};
    double total = 0;
    for (const auto& g : segs) {
      double lo = std::max(g.lo, r.x1), hi = std::min(g.hi, r.x2);
      // y1 <= s x + c <= y2
      const double xa = (r.y1 - g.c) / g.s, xb = (r.y2 - g.c) / g.s;
      lo = std::max(lo, std::min(xa, xb));
      hi = std::min(hi, std::max(xa, xb));
      if (hi > lo) total += 0.5 * (hi - lo);
    }
    return total;
  }

  double cdf(double x, double y) const {
    return measure({0, std::clamp(x, 0.0, 1.0), 0, std::clamp(y, 0.0, 1.0)});
  }

 private:
  double z_;
};

inline double mu_z(double z, const Rect& r) {
  r.validate();
  return RectangleMeasureZ(z).measure(r);
}

/// Values of a cdf on the (m+1)^2 grid points (i/m, j/m).
struct GridCdf {
  int m = 0;
  std::vector<double> values;

  double at(int i, int j) const { return values[static_cast<std::size_t>(i) * (m + 1) + j]; }
};

template <class M>
GridCdf grid_cdf(const M& measure, int m) {
  if (m < 2) throw std::invalid_argument("grid resolution must be at least 2");
  GridCdf g{m, std::vector<double>(static_cast<std::size_t>(m + 1) * (m + 1))};
  for (int i = 0; i <= m; ++i)
    for (int j = 0; j <= m; ++j)
      g.values[static_cast<std::size_t>(i) * (m + 1) + j] =
          measure.cdf(static_cast<double>(i) / m, static_cast<double>(j) / m);
  return g;
}

/// Grid cdf of mu_p in O(n + m^2): each diagram cell is split over the grid
/// cells it overlaps, then prefix-summed. Lengths are integers in units of
/// 1/(n m).
inline GridCdf grid_cdf(const Permutation& p, int m) {
  if (m < 2) throw std::invalid_argument("grid resolution must be at least 2");
  const long n = p.size();
  std::vector<double> mass(static_cast<std::size_t>(m) * m, 0.0);
  auto spread = [&](long k, auto&& emit) {
    // Diagram interval [(k-1) m, k m]; grid cell a spans [a n, (a+1) n].
    const long lo = (k - 1) * m, hi = k * m;
    for (long a = lo / n; a < m && a * n < hi; ++a) {
      const long ov = std::min(hi, (a + 1) * n) - std::max(lo, a * n);
      if (ov > 0) emit(static_cast<int>(a), static_cast<double>(ov) / m);
    }
  };
  for (long i = 1; i <= n; ++i) {
    const long v = p(static_cast<int>(i));
    spread(i, [&](int a, double fx) {
      spread(v, [&](int b, double fy) { mass[static_cast<std::size_t>(a) * m + b] += fx * fy / n; });
    });
  }
  GridCdf g{m, std::vector<double>(static_cast<std::size_t>(m + 1) * (m + 1), 0.0)};
  for (int i = 1; i <= m; ++i)
    for (int j = 1; j <= m; ++j)
      g.values[static_cast<std::size_t>(i) * (m + 1) + j] = mass[static_cast<std::size_t>(i - 1) * m + (j - 1)] +
                                                             g.at(i - 1, j) + g.at(i, j - 1) - g.at(i - 1, j - 1);
  return g;
}

/// max |m1(R) - m2(R)| over rectangles with corners on the (m+1)^2 grid.
/// For fixed columns a < b the rectangle difference is h(d) - h(c) with
/// h(j) = g(b,j) - g(a,j), so its sup is max h - min h: O(m^3) overall.
inline double d_square_grid(const GridCdf& x, const GridCdf& y) {
  if (x.m != y.m) throw std::invalid_argument("grid resolutions differ");
  const int m = x.m;
  double best = 0;
  for (int a = 0; a < m; ++a)
    for (int b = a + 1; b <= m; ++b) {
      double lo = 0, hi = 0;  // h(0) = 0 for any cdf
      for (int j = 0; j <= m; ++j) {
        const double h = (x.at(b, j) - y.at(b, j)) - (x.at(a, j) - y.at(a, j));
        lo = std::min(lo, h);
        hi = std::max(hi, h);
      }
      best = std::max(best, hi - lo);
    }
  return best;
}

template <class M1, class M2>
double d_square_grid(const M1& m1, const M2& m2, int m) {
  return d_square_grid(grid_cdf(m1, m), grid_cdf(m2, m));
}

/// O(m^4) scan over every grid rectangle; oracle for d_square_grid.
template <class M1, class M2>
double d_square_grid_brute_force(const M1& m1, const M2& m2, int m) {
  if (m < 2) throw std::invalid_argument("grid resolution must be at least 2");
  double best = 0;
  for (int a = 0; a < m; ++a)
    for (int b = a + 1; b <= m; ++b)
      for (int c = 0; c < m; ++c)
        for (int d = c + 1; d <= m; ++d) {
          const Rect r{static_cast<double>(a) / m, static_cast<double>(b) / m, static_cast<double>(c) / m,
                       static_cast<double>(d) / m};
          best = std::max(best, std::abs(measure_of(m1, r) - measure_of(m2, r)));
        }
  return best;
}

// ---------------------------------------------------------------------------
// Anchor law Beta(k+1, k+1)

/// (2k+1) C(2k,k) (t(1-t))^k.
inline double anchor_density(int k, double t) {
  if (k < 0) throw std::invalid_argument("k must be nonnegative");
  if (!(t >= 0.0 && t <= 1.0)) throw std::domain_error("anchor_density: t outside [0,1]");
  return (2.0 * k + 1) * to_double(binomial(2 * k, k)) * std::pow(t * (1 - t), k);
}

/// Exact cdf in rationals: (2k+1) C(2k,k) sum_j C(k,j) (-1)^j s^{k+j+1}/(k+j+1).
inline ExactRational anchor_cdf_exact(int k, const ExactRational& s) {
  if (k < 0) throw std::invalid_argument("k must be nonnegative");
  if (s < 0 || s > 1) throw std::domain_error("anchor_cdf: s outside [0,1]");
  ExactRational total = 0;
  ExactRational sp = 1;
  for (int e = 0; e < k; ++e) sp *= s;
  for (int j = 0; j <= k; ++j) {
    sp *= s;  // s^{k+j+1}
    ExactRational term = ExactRational(binomial(k, j)) * sp / ExactRational(k + j + 1);
    if (j % 2) total -= term;
    else total += term;
  }
  return total * ExactRational((2 * k + 1) * binomial(2 * k, k));
}

/// Same polynomial in the Bernstein basis: P(Bin(2k+1, s) >= k+1). All terms
/// are positive, so the double evaluation does not cancel.
inline double anchor_cdf(int k, double s) {
  if (k < 0) throw std::invalid_argument("k must be nonnegative");
  if (!(s >= 0.0 && s <= 1.0)) throw std::domain_error("anchor_cdf: s outside [0,1]");
  const int m = 2 * k + 1;
  double total = 0;
  for (int j = k + 1; j <= m; ++j)
    total += to_double(binomial(m, j)) * std::pow(s, j) * std::pow(1 - s, m - j);
  return std::min(1.0, total);
}

struct AnchorLaw {
  int k = 0;

  double density(double t) const { return anchor_density(k, t); }
  double cdf(double s) const { return anchor_cdf(k, s); }
  double mean() const { return 0.5; }
  /// E|Z - 1/2|.
  double mean_abs_deviation() const {
    // 2 * int_{1/2}^1 (t - 1/2) f(t) dt, by Simpson on a fine mesh.
    const int steps = 2000;
    const double h = 0.5 / steps;
    double acc = 0;
    for (int i = 0; i <= steps; ++i) {
      const double t = 0.5 + i * h;
      const double w = (i == 0 || i == steps) ? 1 : (i % 2 ? 4 : 2);
      acc += w * (t - 0.5) * density(t);
    }
    return 2 * acc * h / 3;
  }
  double quantile(double p) const {
    if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("quantile level outside [0,1]");
    double lo = 0, hi = 1;
    for (int it = 0; it < 100; ++it) {
      const double mid = 0.5 * (lo + hi);
      (cdf(mid) < p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  }
};

/// sup_x |F_N(x) - F(x)| for the empirical cdf F_N of the samples.
template <class Cdf>
double ks_statistic(std::span<const double> samples, Cdf&& cdf) {
  if (samples.empty()) throw std::invalid_argument("ks_statistic needs samples");
  std::vector<double> xs(samples.begin(), samples.end());
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  return d;
}

}  // namespace recordlab
