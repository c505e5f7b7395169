#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "recordlab/counting.hpp"
#include "recordlab/projection.hpp"
#include "recordlab/sampling.hpp"

namespace recordlab {
namespace {

std::string alternating(int n, char a, char b) {
  std::string s;
  for (int i = 0; i < n; ++i) s += i % 2 ? b : a;
  return s;
}

// Every good pair of size n, in lexicographic mask order.
template <class F>
void for_each_good_pair(int n, F&& f) {
  const unsigned full = (1u << n) - 1;
  for (unsigned xm = 0; xm <= full; ++xm)
    for (unsigned ym = 0; ym <= full; ++ym)
      for (int z = 1; z <= n; ++z) {
        AnchoredPair a;
        for (int i = 0; i < n; ++i) {
          a.x += (xm >> i & 1u) ? 'U' : 'D';
          a.y += (ym >> i & 1u) ? 'R' : 'L';
        }
        a.z0 = z;
        if (is_good(a)) f(a);
      }
}

TEST(Project, Examples) {
  EXPECT_EQ(project(Permutation::parse("35214")).str(), "DUDDD LLLRL 4");
  EXPECT_EQ(project(Permutation::identity(3)).str(), "DDD LLL 1");
  EXPECT_THROW(project(Permutation::parse("25314")), std::invalid_argument);
}

TEST(AnchoredPair, ParseAndFormat) {
  const auto a = AnchoredPair::parse("DUDDD LLLRL 4");
  EXPECT_EQ(a.x, "DUDDD");
  EXPECT_EQ(a.y, "LLLRL");
  EXPECT_EQ(a.z0, 4);
  EXPECT_THROW(AnchoredPair::parse("DUX LLL 1"), std::invalid_argument);
  EXPECT_THROW(AnchoredPair::parse("DUD LLL 4"), std::invalid_argument);
  EXPECT_THROW(AnchoredPair::parse("DUD LL 1"), std::invalid_argument);
}

TEST(IsGood, Examples) {
  EXPECT_TRUE(is_good(AnchoredPair::parse("DUDDD LLLRL 4")));
  EXPECT_FALSE(is_good(AnchoredPair::parse("UDDDD LLLRL 4")));
  EXPECT_FALSE(is_good(AnchoredPair::parse("DUDUD LLLRL 4")));
  EXPECT_FALSE(is_good(AnchoredPair::parse("DUDDD RLLRL 4")));
}

TEST(CountGood, FormulaAndBruteForce) {
  EXPECT_EQ(count_good(4), 48);
  EXPECT_EQ(count_good(3), 10);
  EXPECT_EQ(count_good(5), 224);
  for (int n = 3; n <= 10; ++n) EXPECT_EQ(count_good(n), count_good_brute_force(n)) << n;
  EXPECT_THROW(count_good(2), std::invalid_argument);
}

TEST(Project, InjectiveWithGoodImage) {
  for (int n = 3; n <= 8; ++n) {
    std::set<AnchoredPair> images;
    const auto squares = enumerate_sq(n);
    for (const auto& p : squares) {
      const auto a = project(p);
      ASSERT_TRUE(is_good(a)) << p.str();
      images.insert(a);
    }
    EXPECT_EQ(images.size(), squares.size()) << n;
  }
}

TEST(Reconstruct, RoundTripsEverySquarePermutation) {
  for (int n = 3; n <= 8; ++n)
    for (const auto& p : enumerate_sq(n)) {
      const auto r = reconstruct(project(p));
      ASSERT_TRUE(r.has_value()) << p.str();
      ASSERT_EQ(*r, p);
    }
  EXPECT_EQ(reconstruct(AnchoredPair::parse("DUDDD LLLRL 4")), Permutation::parse("35214"));
}

TEST(Reconstruct, SucceedsExactlyOnTheImage) {
  for (int n = 3; n <= 7; ++n) {
    ExactCount successes = 0, failures = 0;
    for_each_good_pair(n, [&](const AnchoredPair& a) {
      const auto r = reconstruct(a);
      if (r) {
        ++successes;
        ASSERT_EQ(project(*r), a);
      } else {
        ++failures;
      }
    });
    EXPECT_EQ(successes, ExactCount(enumerate_sq(n).size())) << n;
    EXPECT_EQ(successes + failures, count_good(n));
  }
}

TEST(Reconstruct, FindsGoodPairOutsideImageAtSizeEight) {
  bool found = false;
  for_each_good_pair(8, [&](const AnchoredPair& a) {
    if (!found && !reconstruct(a)) found = true;
  });
  EXPECT_TRUE(found);
  EXPECT_THROW(reconstruct(AnchoredPair::parse("UDDDD LLLLL 2")), std::invalid_argument);
}

TEST(Petrov, AlternatingSequenceHolds) {
  EXPECT_TRUE(petrov_labels(alternating(100, 'D', 'U'), 'D'));
  EXPECT_TRUE(petrov_labels(alternating(100, 'D', 'U'), 'U'));
  EXPECT_TRUE(petrov_labels(alternating(4, 'D', 'U'), 'D'));
}

TEST(Petrov, ConstantSequenceFails) {
  const auto r = petrov_report(std::string(100, 'D'), 'D');
  EXPECT_FALSE(r.all());
  // Positions of consecutive D's differ by 1 instead of 2: deviation 7 at
  // distance 7 exceeds 100^0.4.
  EXPECT_FALSE(r.position_local);
  EXPECT_FALSE(petrov_labels(std::string(100, 'D'), 'D'));
}

TEST(Petrov, ShortConstantSequenceStillBinds) {
  // With n = 4 the global count window starts above 4^0.3 ~ 1.52, so pairs
  // at distance 2 are checked: |2 - 1| = 1 is not below 2^0.6 / 2 ~ 0.758.
  const auto r = petrov_report("DDDD", 'D');
  EXPECT_FALSE(r.count_global);
  EXPECT_TRUE(r.count_local);
}

TEST(Regularity, DefaultWindow) {
  EXPECT_EQ(RegularityParams::defaults(10000).delta_n, static_cast<long>(std::ceil(std::pow(10000.0, 0.9))));
  EXPECT_EQ(RegularityParams::defaults(100, 1000).delta_n, 317);
}

TEST(Regularity, SmallSizesAreIrregular) {
  for (int n = 4; n <= 8; ++n) {
    RegularityParams params;
    params.delta_n = n;
    for (const auto& p : enumerate_sq(n)) {
      const auto rc = classify_regularity(p, params);
      ASSERT_FALSE(rc.regular);
      ASSERT_FALSE(rc.anchor_in_window);
    }
  }
}

TEST(Regularity, IdentityProjectionIsIrregular) {
  const auto p = Permutation::identity(200);
  EXPECT_EQ(project(p).x, std::string(200, 'D'));
  EXPECT_FALSE(classify_regularity(p, RegularityParams::defaults(200)).regular);
}

TEST(Regularity, UniformSquaresAtLargeSize) {
  // Only the local count condition holds for typical projections. The
  // position fluctuations over m occurrences have spread sqrt(2m), which
  // already beats n^0.4 at m = n^0.6 (see README).
  const int n = 10000;
  const auto params = RegularityParams::defaults(n);
  int local_ok = 0, window = 0, regular = 0;
  const int samples = 40;
  for (int s = 0; s < samples; ++s) {
    RngStream rng(2024, static_cast<std::uint64_t>(s));
    const auto p = sample_square(n, rng);
    const auto a = project(p);
    bool local = true;
    for (auto [seq, label] : {std::pair{&a.x, 'D'}, {&a.x, 'U'}, {&a.y, 'L'}, {&a.y, 'R'}}) {
      const auto r = petrov_report(*seq, label);
      local = local && r.count_local;
    }
    local_ok += local;
    const auto rc = classify_regularity(p, params);
    window += rc.anchor_in_window;
    regular += rc.regular;
  }
  EXPECT_GE(local_ok, samples * 9 / 10);
  EXPECT_GT(window, 0);
  EXPECT_LE(regular, window);
}

// Distance from a diagram point to the rectangle through (z0,0), (0,z0),
// (n-z0,n), (n,n-z0).
double band_distance(double x, double y, double n, double z0) {
  const double corners[4][2] = {{z0, 0}, {0, z0}, {n - z0, n}, {n, n - z0}};
  auto segment = [&](const double* a, const double* b) {
    const double dx = b[0] - a[0], dy = b[1] - a[1];
    const double t = std::clamp(((x - a[0]) * dx + (y - a[1]) * dy) / (dx * dx + dy * dy), 0.0, 1.0);
    return std::hypot(x - a[0] - t * dx, y - a[1] - t * dy);
  };
  double d = segment(corners[0], corners[1]);
  d = std::min(d, segment(corners[1], corners[2]));
  d = std::min(d, segment(corners[2], corners[3]));
  d = std::min(d, segment(corners[3], corners[0]));
  return d;
}

TEST(Regularity, BandGeometryForBulkAnchors) {
  for (int n : {2000, 5000}) {
    const auto params = RegularityParams::defaults(n);
    double worst_c = 0;
    int used = 0;
    for (int s = 0; used < 10 && s < 400; ++s) {
      RngStream rng(77, static_cast<std::uint64_t>(s));
      const auto p = sample_square(n, rng);
      if (!classify_regularity(p, params).anchor_in_window) continue;
      ++used;
      const double z0 = p.position_of(1);
      double worst = 0;
      for (int i = 1; i <= n; ++i) worst = std::max(worst, band_distance(i, p(i), n, z0));
      worst_c = std::max(worst_c, worst / std::pow(n, 0.6));
    }
    ASSERT_EQ(used, 10) << n;
    RecordProperty("smallest_band_constant_n" + std::to_string(n), std::to_string(worst_c));
    EXPECT_LE(worst_c, params.band_constant) << n;
  }
}

TEST(RegionBounds, DegenerateAndErrors) {
  RegularityParams params;
  params.delta_n = 10;
  params.band_constant = 0;
  const auto b = insertion_region_bounds(100, 30, params);
  EXPECT_DOUBLE_EQ(b.lower, 2.0 * 30 * 70);
  EXPECT_DOUBLE_EQ(b.upper, 2.0 * 30 * 70);
  EXPECT_DOUBLE_EQ(insertion_region_bounds(100, 50, params).lower, 100.0 * 100 / 2);
  EXPECT_THROW(insertion_region_bounds(100, 5, params), std::invalid_argument);
  EXPECT_THROW(insertion_region_bounds(100, 95, params), std::invalid_argument);
}

TEST(RegionBounds, HoldForSampledBulkAnchors) {
  const int n = 2000;
  const auto params = RegularityParams::defaults(n);
  int used = 0;
  for (int s = 0; used < 10 && s < 400; ++s) {
    RngStream rng(91, static_cast<std::uint64_t>(s));
    const auto p = sample_square(n, rng);
    const int z0 = p.position_of(1);
    if (!(z0 > params.delta_n && z0 < n - params.delta_n)) continue;
    ++used;
    const auto b = insertion_region_bounds(n, z0, params);
    const auto count = static_cast<double>(internal_cell_count(p));
    EXPECT_LE(b.lower, count) << z0;
    EXPECT_LE(count, b.upper) << z0;
  }
  EXPECT_EQ(used, 10);
}

}  // namespace
}  // namespace recordlab
