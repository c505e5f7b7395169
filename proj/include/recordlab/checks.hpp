#pragma once

// Monte Carlo checks built from the samplers: the fluctuation law for
// ASq(Av_n(321), k) and the displacement inequalities for uniform Av_n(321).

#include <cmath>
#include <cstdint>
#include <vector>

#include "recordlab/dyck321.hpp"
#include "recordlab/excursion.hpp"
#include "recordlab/parallel.hpp"
#include "recordlab/rng.hpp"
#include "recordlab/sampling.hpp"

namespace recordlab {

namespace detail {

struct MeanSe {
  double mean = 0;
  double se = 0;
};

inline MeanSe mean_se(const std::vector<double>& xs) {
  MeanSe r;
  if (xs.empty()) return r;
  double s = 0;
  for (double x : xs) s += x;
  r.mean = s / static_cast<double>(xs.size());
  if (xs.size() < 2) return r;
  double v = 0;
  for (double x : xs) v += (x - r.mean) * (x - r.mean);
  r.se = std::sqrt(v / static_cast<double>(xs.size() - 1) / static_cast<double>(xs.size()));
  return r;
}

// Reference Dyck paths use a separate seed so they never share streams with
// the permutation draws.
constexpr std::uint64_t kReferenceSeedMix = 0x5eedd1c7a11ef00dULL;

}  // namespace detail

struct FluctuationLawReport {
  int n = 0, k = 0;
  std::size_t samples = 0;
  std::uint64_t proposals = 0;
  double acceptance_rate = 0;
  double mean_integral = 0, se_integral = 0;
  double target_area = 0;  // E[A^{k+1}] / E[A^k]
  double z_integral = 0;
  double mean_sup = 0, se_sup = 0;
  double target_sup = 0;   // k-biased mean of max height / sqrt(2n) from reference paths
  double target_sup_n_eff = 0;
  double z_sup = 0;
  bool pass = false;       // |z_integral| <= 3
};

/// Draws N exact samples of ASq(Av_n(321), k) and compares the means of the
/// integral and sup of F with the k-biased excursion targets. The area target
/// is exact; the sup target is an area-weighted estimate over N uniform Dyck
/// paths of semilength n.
inline FluctuationLawReport fluctuation_law_check(int n, int k, std::uint64_t seed, std::size_t count,
                                                  unsigned workers = 1) {
  struct Row {
    double integral = 0, sup = 0;
    std::uint64_t proposals = 0;
  };
  const auto rows = parallel_map(count, workers, [&](std::size_t i) {
    RngStream rng(seed, i);
    const ExactDraw d = sample_asq_av321_exact_counted(n, k, rng);
    const FluctuationPath f = fluctuation(d.perm, k);
    return Row{f.integral(), f.sup(), d.proposals};
  });
  struct Ref {
    double area = 0, max = 0;
  };
  const auto refs = parallel_map(count, workers, [&](std::size_t i) {
    RngStream rng(seed ^ detail::kReferenceSeedMix, i);
    const DyckPath d = uniform_dyck(n, rng);
    return Ref{normalized_area(d), max_height(d) / std::sqrt(2.0 * n)};
  });

  FluctuationLawReport r;
  r.n = n;
  r.k = k;
  r.samples = count;
  std::vector<double> integrals, sups, areas, maxes;
  for (const auto& row : rows) {
    integrals.push_back(row.integral);
    sups.push_back(row.sup);
    r.proposals += row.proposals;
  }
  for (const auto& ref : refs) {
    areas.push_back(ref.area);
    maxes.push_back(ref.max);
  }
  r.acceptance_rate = r.proposals ? static_cast<double>(count) / static_cast<double>(r.proposals) : 0.0;
  const auto mi = detail::mean_se(integrals), ms = detail::mean_se(sups);
  r.mean_integral = mi.mean;
  r.se_integral = mi.se;
  r.mean_sup = ms.mean;
  r.se_sup = ms.se;
  r.target_area = biased_area_target(k);
  r.z_integral = mi.se > 0 ? (mi.mean - r.target_area) / mi.se : 0.0;
  if (!areas.empty()) {
    const auto t = biased_functional(k, areas, maxes);
    r.target_sup = t.value;
    r.target_sup_n_eff = t.n_eff;
    const double ref_se = detail::mean_se(maxes).se * std::sqrt(static_cast<double>(count) / std::max(1.0, t.n_eff));
    const double se = std::hypot(ms.se, ref_se);
    r.z_sup = se > 0 ? (ms.mean - t.value) / se : 0.0;
  }
  r.pass = std::abs(r.z_integral) <= 3.0;
  return r;
}

/// Violation counts for the displacement inequalities over uniform Av_n(321).
struct InequalityReport {
  int n = 0;
  std::size_t samples = 0;
  std::size_t flux_violations = 0;          // flux_check fails (10 n^0.4)
  std::size_t displacement_violations = 0;  // D > M + 10 n^0.4
  std::size_t sandwich_violations = 0;      // plus or minus gap >= 25 n^0.4
  std::size_t spacing_violations = 0;       // spacing > n^0.3
  double mean_spacing = 0;
  int worst_spacing = 0;

  double rate(std::size_t v) const { return samples ? static_cast<double>(v) / static_cast<double>(samples) : 0.0; }
};

inline InequalityReport inequality_suite(int n, std::uint64_t seed, std::size_t count, unsigned workers = 1) {
  struct Row {
    bool flux = false, disp = false, sand = false, spacing = false;
    int spacing_value = 0;
  };
  const double nn = static_cast<double>(n);
  const double b10 = 10.0 * std::pow(nn, 0.4), b25 = 25.0 * std::pow(nn, 0.4), b3 = std::pow(nn, 0.3);
  const auto rows = parallel_map(count, workers, [&](std::size_t i) {
    RngStream rng(seed, i);
    const DyckPath d = uniform_dyck(n, rng);
    const Permutation p = bjs_to_perm(d);
    Row row;
    row.flux = !flux_check(p, d).pass;
    row.disp = max_displacement(p) > max_height(d) + b10;
    const SandwichReport s = sandwich_check(p);
    row.sand = s.plus_gap >= b25 || s.minus_gap >= b25;
    row.spacing = s.spacing > b3;
    row.spacing_value = s.spacing;
    return row;
  });
  InequalityReport r;
  r.n = n;
  r.samples = count;
  double total = 0;
  for (const auto& row : rows) {
    r.flux_violations += row.flux;
    r.displacement_violations += row.disp;
    r.sandwich_violations += row.sand;
    r.spacing_violations += row.spacing;
    total += row.spacing_value;
    r.worst_spacing = std::max(r.worst_spacing, row.spacing_value);
  }
  r.mean_spacing = count ? total / static_cast<double>(count) : 0.0;
  return r;
}

}  // namespace recordlab
