#pragma once

// Moments of the Brownian excursion area A = int_0^1 e_t dt and area-biased
// functionals estimated from uniform Dyck paths.

#include <cmath>
#include <functional>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "recordlab/exact.hpp"

namespace recordlab {

/// Gamma(3j + 1/2) / Gamma(j + 1/2) = prod_{t=j}^{3j-1} (2t + 1) / 2.
inline ExactRational gamma_half_ratio(int j) {
  ExactRational r = 1;
  for (int t = j; t <= 3 * j - 1; ++t) r *= ExactRational(2 * t + 1, 2);
  return r;
}

/// xi_r for r = 1..max_r (index 0 unused), from
///   xi_r = 12r/(6r-1) * G(r) - sum_{j=1}^{r-1} C(r,j) G(j) xi_{r-j},
/// G(j) = Gamma(3j+1/2)/Gamma(j+1/2).
inline std::vector<ExactRational> xi_table(int max_r) {
  if (max_r < 1) throw std::invalid_argument("xi requires r >= 1");
  std::vector<ExactRational> g(static_cast<std::size_t>(max_r) + 1), xi(static_cast<std::size_t>(max_r) + 1);
  for (int j = 1; j <= max_r; ++j) g[j] = gamma_half_ratio(j);
  for (int r = 1; r <= max_r; ++r) {
    ExactRational v = ExactRational(12 * r, 6 * r - 1) * g[r];
    for (int j = 1; j <= r - 1; ++j) v -= ExactRational(binomial(r, j)) * g[j] * xi[r - j];
    xi[r] = v;
  }
  return xi;
}

inline ExactRational xi(int r) { return xi_table(r)[static_cast<std::size_t>(r)]; }

/// E[A^k] = (36 sqrt 2)^{-k} * 2 sqrt(pi) * xi_k / Gamma((3k-1)/2).
///
/// For odd k, Gamma((3k-1)/2) is a factorial; for even k it is a rational
/// multiple of sqrt(pi), which cancels. The result is rational * 2^{-k/2},
/// times sqrt(pi) when k is odd, and is converted to double once.
struct AreaMoment {
  int k = 0;
  ExactRational xi;         // xi_k (1 for k = 0)
  ExactRational rational;   // E[A^k] = rational * 2^{-k/2} * (sqrt(pi) if k odd)
  double value = 1.0;
};

inline AreaMoment excursion_area_moment_exact(int k, const ExactRational& xi_k) {
  AreaMoment m;
  m.k = k;
  if (k == 0) {
    m.xi = 1;
    m.rational = 1;
    m.value = 1.0;
    return m;
  }
  m.xi = xi_k;
  ExactRational r = ExactRational(2) * xi_k / ExactRational(power(ExactCount(36), static_cast<unsigned>(k)));
  if (k % 2 == 1) {
    // Gamma((3k-1)/2) = ((3k-3)/2)!
    r /= ExactRational(factorial(static_cast<unsigned>((3 * k - 3) / 2)));
  } else {
    // Gamma(h + 1/2) = sqrt(pi) (2h)! / (4^h h!), h = (3k-2)/2
    const unsigned h = static_cast<unsigned>((3 * k - 2) / 2);
    r *= ExactRational(power(ExactCount(4), h) * factorial(h));
    r /= ExactRational(factorial(2 * h));
  }
  m.rational = r;
  // Convert through long double and split the power of two to keep the
  // conversion accurate for large k.
  long double v = static_cast<long double>(to_double(r));
  v *= std::pow(2.0L, -static_cast<long double>(k) / 2.0L);
  if (k % 2 == 1) v *= std::sqrt(std::numbers::pi_v<long double>);
  m.value = static_cast<double>(v);
  return m;
}

inline double excursion_area_moment(int k) {
  if (k < 0) throw std::invalid_argument("moment order must be nonnegative");
  if (k == 0) return 1.0;
  return excursion_area_moment_exact(k, xi(k)).value;
}

/// Moments E[A^0..A^K].
inline std::vector<AreaMoment> excursion_moment_table(int max_k) {
  std::vector<AreaMoment> out;
  out.push_back(excursion_area_moment_exact(0, 1));
  if (max_k < 1) return out;
  const auto xs = xi_table(max_k);
  for (int k = 1; k <= max_k; ++k) out.push_back(excursion_area_moment_exact(k, xs[static_cast<std::size_t>(k)]));
  return out;
}

/// Mean of the area under the k-biased excursion: E[A^{k+1}] / E[A^k].
inline double biased_area_target(int k) { return excursion_area_moment(k + 1) / excursion_area_moment(k); }

struct BiasedEstimate {
  double value = 0;
  double n_eff = 0;
  std::size_t samples = 0;
};

/// Self-normalised estimate of E[G(e^k)] from uniform-path samples:
/// sum a_i^k G_i / sum a_i^k, with a_i the normalised area of sample i.
inline BiasedEstimate biased_functional(int k, std::span<const double> areas, std::span<const double> g_values) {
  if (areas.empty()) throw std::invalid_argument("biased_functional needs samples");
  if (areas.size() != g_values.size()) throw std::invalid_argument("areas and functional values differ in length");
  long double sw = 0, sw2 = 0, swg = 0;
  for (std::size_t i = 0; i < areas.size(); ++i) {
    const long double w = std::pow(static_cast<long double>(areas[i]), k);
    sw += w;
    sw2 += w * w;
    swg += w * g_values[i];
  }
  BiasedEstimate e;
  e.samples = areas.size();
  if (sw <= 0) throw std::domain_error("all sample weights are zero");
  e.value = static_cast<double>(swg / sw);
  e.n_eff = static_cast<double>(sw * sw / sw2);
  return e;
}

/// Same estimate with G evaluated per sample index.
template <class G>
BiasedEstimate biased_functional_by(int k, std::span<const double> areas, G&& g) {
  std::vector<double> gv(areas.size());
  for (std::size_t i = 0; i < areas.size(); ++i) gv[i] = g(i);
  return biased_functional(k, areas, std::span<const double>(gv));
}

}  // namespace recordlab
