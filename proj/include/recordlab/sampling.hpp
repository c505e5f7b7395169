#pragma once

// Samplers for square, almost square and 321-avoiding permutations (with
// internal points), exact rejection and self-normalised importance sampling.

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "recordlab/counting.hpp"
#include "recordlab/dyck321.hpp"
#include "recordlab/parallel.hpp"
#include "recordlab/permutation.hpp"
#include "recordlab/projection.hpp"
#include "recordlab/rng.hpp"

namespace recordlab {

/// Uniform good anchored pair of size n >= 2. Anchors 1 and n carry twice the
/// weight of interior anchors, since an interior anchor also forces X_{z0}.
inline AnchoredPair sample_good_pair(int n, RngStream& rng) {
  if (n < 2) throw std::invalid_argument("good pairs need n >= 2");
  AnchoredPair a;
  a.x.assign(static_cast<std::size_t>(n), 'D');
  a.y.assign(static_cast<std::size_t>(n), 'L');
  if (n == 2) {
    a.z0 = 1 + static_cast<int>(rng.below(2));
  } else {
    const auto r = static_cast<int>(rng.below(static_cast<std::uint64_t>(n) + 2));
    a.z0 = r < 2 ? 1 : r < 4 ? n : r - 2;
  }
  std::uint64_t bits = 0;
  int left = 0;
  auto bit = [&] {
    if (left == 0) {
      bits = rng();
      left = 64;
    }
    --left;
    const bool b = bits & 1u;
    bits >>= 1;
    return b;
  };
  for (int i = 2; i <= n - 1; ++i) {
    const bool up = bit();
    if (i != a.z0 && up) a.x[i - 1] = 'U';
  }
  for (int v = 2; v <= n - 1; ++v)
    if (bit()) a.y[v - 1] = 'R';
  return a;
}

struct SquareDraw {
  Permutation perm;
  std::uint64_t attempts = 0;  // good pairs drawn, including the accepted one
};

/// Exactly uniform on Sq(n): uniform good pairs are drawn until one lies in
/// the image of the projection. Each square permutation owns exactly one good
/// pair, so accepted outputs are uniform.
inline SquareDraw sample_square_counted(int n, RngStream& rng) {
  if (n < 1) throw std::invalid_argument("sample_square requires n >= 1");
  if (n == 1) return {Permutation::identity(1), 1};
  SquareDraw d;
  for (;;) {
    ++d.attempts;
    if (auto p = reconstruct(sample_good_pair(n, rng))) {
      d.perm = std::move(*p);
      return d;
    }
  }
}

inline Permutation sample_square(int n, RngStream& rng) { return sample_square_counted(n, rng).perm; }

/// Oracle sampler: uniform index into the exhaustive list.
inline Permutation sample_square_from_list(const std::vector<Permutation>& all, RngStream& rng) {
  return all[rng.below(all.size())];
}

/// Uniform cell of I(p) given an index in [0, |I(p)|).
inline Cell internal_cell_at(const InternalColumns& cols, std::int64_t index) {
  for (std::size_t c = 0; c < cols.lo.size(); ++c) {
    const std::int64_t w = std::max(0, cols.hi[c] - cols.lo[c]);
    if (index < w) return {static_cast<int>(c) + 1, cols.lo[c] + 1 + static_cast<int>(index)};
    index -= w;
  }
  throw std::out_of_range("internal cell index out of range");
}

struct WeightedSample {
  Permutation object;
  double log_weight = -std::numeric_limits<double>::infinity();  // log prod |I(s^{l-1})|
  bool accepted = false;

  double weight() const { return std::exp(log_weight); }
};

/// Grows a uniformly chosen internal sequence of length k from `start`.
/// The weight is the product of the candidate-set sizes; an empty candidate
/// set yields weight zero and accepted = false.
inline WeightedSample grow_internal(const Permutation& start, int k, RngStream& rng) {
  WeightedSample s;
  s.object = start;
  double lw = 0;
  for (int l = 0; l < k; ++l) {
    const InternalColumns cols = internal_columns(s.object);
    const std::int64_t c = cols.count();
    if (c == 0) return s;
    lw += std::log(static_cast<double>(c));
    s.object = insert(s.object, internal_cell_at(cols, static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(c)))));
  }
  s.log_weight = lw;
  s.accepted = true;
  return s;
}

struct ExactDraw {
  Permutation perm;
  std::uint64_t proposals = 0;  // exterior draws consumed
};

namespace detail {

// Accept step l with probability |I(s^{l-1})| / (n+k+1)^2 and, on acceptance,
// use the same uniform index as the chosen cell. The product of the step
// probabilities is prod |I| / (n+k+1)^{2k}.
template <class ExteriorSampler>
ExactDraw exact_with_internal(int n, int k, RngStream& rng, ExteriorSampler&& exterior_sampler) {
  ExactDraw d;
  const std::uint64_t side = static_cast<std::uint64_t>(n) + static_cast<std::uint64_t>(k) + 1;
  const std::uint64_t cap = side * side;
  for (;;) {
    ++d.proposals;
    Permutation cur = exterior_sampler(rng);
    bool ok = true;
    for (int l = 0; l < k && ok; ++l) {
      const InternalColumns cols = internal_columns(cur);
      const auto c = static_cast<std::uint64_t>(cols.count());
      const std::uint64_t u = rng.below(cap);
      if (u >= c) {
        ok = false;
        break;
      }
      cur = insert(cur, internal_cell_at(cols, static_cast<std::int64_t>(u)));
    }
    if (ok) {
      d.perm = std::move(cur);
      return d;
    }
  }
}

}  // namespace detail

/// Exactly uniform on ASq(n, k).
inline ExactDraw sample_asq_exact_counted(int n, int k, RngStream& rng) {
  if (k < 0) throw std::invalid_argument("k must be nonnegative");
  return detail::exact_with_internal(n, k, rng, [n](RngStream& r) { return sample_square(n, r); });
}

inline Permutation sample_asq_exact(int n, int k, RngStream& rng) { return sample_asq_exact_counted(n, k, rng).perm; }

/// Uniform on Av_n(321) through a uniform Dyck path.
inline Permutation sample_av321(int n, RngStream& rng) { return bjs_to_perm(uniform_dyck(n, rng)); }

/// Exactly uniform on ASq(Av_n(321), k).
inline ExactDraw sample_asq_av321_exact_counted(int n, int k, RngStream& rng) {
  if (k < 0) throw std::invalid_argument("k must be nonnegative");
  return detail::exact_with_internal(n, k, rng, [n](RngStream& r) { return sample_av321(n, r); });
}

inline Permutation sample_asq_av321_exact(int n, int k, RngStream& rng) {
  return sample_asq_av321_exact_counted(n, k, rng).perm;
}

/// Proposal i uses stream i: a uniform square exterior plus a uniform internal
/// sequence, weighted by prod |I(s^{l-1})|.
inline std::vector<WeightedSample> sample_asq_snis(int n, int k, std::uint64_t seed, std::size_t count,
                                                   unsigned workers = 1) {
  return parallel_map(count, workers, [&](std::size_t i) {
    RngStream rng(seed, i);
    return grow_internal(sample_square(n, rng), k, rng);
  });
}

struct SnisEstimate {
  double mean = 0;
  double std_error = 0;
  double n_eff = 0;
  std::size_t proposals = 0;
};

/// Weight-normalised mean of stat(sample) with effective sample size
/// (sum w)^2 / sum w^2 and the delta-method standard error.
template <class Stat>
SnisEstimate snis_estimate(const std::vector<WeightedSample>& samples, Stat&& stat) {
  SnisEstimate e;
  e.proposals = samples.size();
  double max_lw = -std::numeric_limits<double>::infinity();
  for (const auto& s : samples)
    if (s.accepted) max_lw = std::max(max_lw, s.log_weight);
  if (!std::isfinite(max_lw)) throw std::domain_error("no proposal with positive weight");
  std::vector<double> w(samples.size(), 0.0), x(samples.size(), 0.0);
  double sw = 0, sw2 = 0, swx = 0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!samples[i].accepted) continue;
    w[i] = std::exp(samples[i].log_weight - max_lw);
    x[i] = stat(samples[i].object);
    sw += w[i];
    sw2 += w[i] * w[i];
    swx += w[i] * x[i];
  }
  e.mean = swx / sw;
  e.n_eff = sw * sw / sw2;
  double var = 0;
  for (std::size_t i = 0; i < samples.size(); ++i) var += w[i] * w[i] * (x[i] - e.mean) * (x[i] - e.mean);
  e.std_error = std::sqrt(var) / sw;
  return e;
}

/// Anchor statistic: position of the value 1 divided by the size.
inline double anchor_fraction(const Permutation& p) {
  return static_cast<double>(p.position_of(1)) / static_cast<double>(p.size());
}

/// Draws count exact samples; draw i uses stream i.
template <class Sampler>
auto draw_many(std::size_t count, std::uint64_t seed, unsigned workers, Sampler&& sampler) {
  return parallel_map(count, workers, [&](std::size_t i) {
    RngStream rng(seed, i);
    return sampler(rng);
  });
}

}  // namespace recordlab
