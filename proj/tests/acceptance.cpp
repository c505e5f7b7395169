// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails. Sampler-driven criteria are rerun with a second worker
// count and their raw per-sample data compared byte for byte.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "oracles.hpp"
#include "recordlab/checks.hpp"
#include "recordlab/counting.hpp"
#include "recordlab/golden.hpp"
#include "recordlab/permuton.hpp"
#include "recordlab/sampling.hpp"

using namespace recordlab;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

// Raw sampler output plus the verdict computed from it.
struct SamplerRun {
  Outcome outcome;
  std::string data;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

void append(std::string& data, double x) { data += fmt("%.17g\n", x); }

// ---------------------------------------------------------------------------
// Exact criteria

Outcome exact_square_counts() {
  std::string detail;
  bool ok = true;
  for (int n = 4; n <= 9; ++n) {
    const ExactCount brute = internal_histogram(n, 0).all[0];
    const ExactCount closed = count_sq_exact(n);
    ok = ok && brute == closed;
    detail += (n > 4 ? " " : "") + brute.str();
  }
  return {ok, "brute force = closed form for n=4..9: " + detail};
}

Outcome sixteen_patterns() {
  const ExactCount c = internal_histogram(5, 1).all[1];
  return {c == 16, "|ASq(4,1)| = " + c.str() + " by filtering S_5"};
}

Outcome bumping_identity() {
  std::vector<InternalHistogram> hist(11);
  for (int m = 1; m <= 10; ++m) hist[m] = internal_histogram(m, 3);
  int checked = 0, mismatches = 0;
  for (int k = 0; k <= 3; ++k)
    for (int n = 1; n + k <= 10; ++n) {
      const bool asq = hist[n + k].all[k] == count_asq_bumping(n, k);
      const bool av = hist[n + k].av321[k] == count_asq_av321_bumping(n, k);
      checked += 2;
      mismatches += !asq + !av;
    }
  return {mismatches == 0, fmt("%d (n,k,family) cases, %d mismatches", checked, mismatches)};
}

Outcome multiplicity_law() {
  long images = 0, bad = 0;
  for (int n = 1; n <= 6; ++n)
    for (const auto& s : enumerate_sq(n))
      for (int k = 1; k <= 3; ++k) {
        std::map<Permutation, long> hits;
        for_each_internal_sequence(s, k, [&](const std::vector<Cell>&, const Permutation& q) { ++hits[q]; });
        const long fact = k == 1 ? 1 : k == 2 ? 2 : 6;
        for (const auto& [q, c] : hits) {
          ++images;
          bad += c != fact || internal_count(q) != k || exterior(q) != s;
        }
      }
  return {bad == 0, fmt("%ld (square, k, image) triples, %ld with multiplicity != k!", images, bad)};
}

Outcome projection_roundtrip() {
  bool ok = true;
  long squares = 0;
  for (int n = 1; n <= 8; ++n) {
    std::set<AnchoredPair> seen;
    for (const auto& p : enumerate_sq(n)) {
      const auto a = project(p);
      const auto back = reconstruct(a);
      ok = ok && is_good(a) && seen.insert(a).second && back && *back == p;
      ++squares;
    }
  }
  bool counts = true;
  for (int n = 3; n <= 10; ++n) counts = counts && count_good_brute_force(n) == count_good(n);
  return {ok && counts, fmt("roundtrip on %ld squares (n=1..8): %s; good-pair counts n=3..10: %s", squares,
                            ok ? "ok" : "FAILED", counts ? "ok" : "FAILED")};
}

Outcome excursion_moments() {
  const auto table = excursion_moment_table(18);
  const bool xi_ok = table[1].xi == 9 && table[2].xi == 405;
  const double e1 = std::abs(table[1].value - std::sqrt(std::numbers::pi / 8));
  const double e2 = std::abs(table[2].value - 5.0 / 12);
  bool convex = true;
  for (int k = 1; k < 18; ++k)
    convex = convex && 2 * std::log(table[k].value) <= std::log(table[k - 1].value) + std::log(table[k + 1].value);
  return {xi_ok && e1 < 1e-10 && e2 < 1e-10 && convex,
          fmt("xi_1=%s xi_2=%s |E[A]-sqrt(pi/8)|=%.1e |E[A^2]-5/12|=%.1e log-convex k<=18: %s",
              table[1].xi.str().c_str(), table[2].xi.str().c_str(), e1, e2, convex ? "yes" : "no")};
}

Outcome ratio_trend() {
  bool ok = true;
  double prev = 0;
  std::string detail;
  for (const auto& row : golden::kRatiosK1) {
    const ExactCount exact = count_asq_bumping(row.n, 1);
    const double ratio = to_double(exact) / asq_asymptotic(row.n, 1).value();
    ok = ok && exact == ExactCount(std::string(row.exact)) &&
         std::abs(ratio - row.ratio) <= golden::kRatioTolerance * row.ratio && ratio > 0 && ratio >= prev;
    prev = ratio;
    detail += fmt(" %d:%.6f", row.n, ratio);
  }
  return {ok, "k=1 ratios vs goldens" + detail};
}

// ---------------------------------------------------------------------------
// Sampler criteria

SamplerRun anchor_law(unsigned workers) {
  const int n = 1000, count = 20000;
  const auto draws = draw_many(count, 7007, workers, [&](RngStream& r) { return sample_asq_exact_counted(n, 1, r); });
  SamplerRun run;
  std::vector<double> z;
  double proposals = 0;
  for (const auto& d : draws) {
    z.push_back(anchor_fraction(d.perm));
    proposals += static_cast<double>(d.proposals);
    append(run.data, z.back());
  }
  const double ks = ks_statistic(z, [](double s) { return anchor_cdf(1, s); });
  run.outcome = {ks < 0.03, fmt("KS vs Beta(2,2) = %.4f over %d draws (%.2f proposals/draw), bound 0.03", ks, count,
                                proposals / count)};
  return run;
}

SamplerRun concentration(unsigned workers) {
  const int n = 2000, k = 50, count = 20000;
  const auto samples = sample_asq_snis(n, k, 9009, count, workers);
  SamplerRun run;
  for (const auto& s : samples) {
    append(run.data, s.log_weight);
    append(run.data, anchor_fraction(s.object));
  }
  const auto e = snis_estimate(samples, [](const Permutation& p) { return std::abs(anchor_fraction(p) - 0.5); });
  run.outcome = {e.mean < 0.05 && e.n_eff >= 500,
                 fmt("E|z/n-1/2| = %.4f +- %.4f (bounds < 0.05), N_eff = %.0f (>= 500), Beta(51,51) value %.4f",
                     e.mean, e.std_error, e.n_eff, AnchorLaw{k}.mean_abs_deviation())};
  return run;
}

SamplerRun fluctuation_mean(unsigned workers) {
  const int n = 1000, count = 10000;
  const auto values = parallel_map(count, workers, [&](std::size_t i) {
    RngStream rng(10010, i);
    return integral_F(sample_av321(n, rng), 0);
  });
  SamplerRun run;
  double sum = 0, sum2 = 0;
  for (double v : values) {
    sum += v;
    sum2 += v * v;
    append(run.data, v);
  }
  const double mean = sum / count, se = std::sqrt((sum2 / count - mean * mean) / count);
  const double target = std::sqrt(std::numbers::pi / 8);
  const double rel = mean / target - 1;
  const double finite = oracle::dyck_area_moments(n, 1)[1];
  run.outcome = {std::abs(rel) <= 0.02,
                 fmt("mean integral_F = %.5f +- %.5f, %+.2f%% vs %.5f (bound 2%%); exact E[area] at n=%d is %.5f (%+.2f%%)",
                     mean, se, 100 * rel, target, n, finite, 100 * (finite / target - 1))};
  return run;
}

SamplerRun biased_area(unsigned workers) {
  const int n = 4096, count = 100000;
  const auto areas = parallel_map(count, workers, [&](std::size_t i) {
    RngStream rng(11011, i);
    return normalized_area(uniform_dyck(n, rng));
  });
  SamplerRun run;
  for (double a : areas) append(run.data, a);
  const auto est = biased_functional(1, areas, areas);
  const double target = biased_area_target(1);
  const double rel = est.value / target - 1;
  const bool area_ok = std::abs(rel) <= 0.03;

  const auto law = fluctuation_law_check(2000, 1, 11012, 5000, workers);
  append(run.data, law.mean_integral);
  append(run.data, law.se_integral);
  append(run.data, law.mean_sup);
  append(run.data, static_cast<double>(law.proposals));
  const auto finite = oracle::dyck_area_moments(2000, 2);
  run.outcome = {area_ok && law.pass,
                 fmt("area-weighted mean %.5f (%+.2f%% vs %.5f, bound 3%%, N_eff %.0f); fluctuation law at n=2000: "
                     "mean integral_F %.5f +- %.5f, z = %.2f (bound 3), acceptance %.3f; exact biased area at "
                     "n=2000 is %.5f",
                     est.value, 100 * rel, target, est.n_eff, law.mean_integral, law.se_integral, law.z_integral,
                     law.acceptance_rate, finite[2] / finite[1])};
  return run;
}

SamplerRun inequality_rates(unsigned workers) {
  const auto r = inequality_suite(4096, 12012, 10000, workers);
  SamplerRun run;
  for (auto v : {r.flux_violations, r.displacement_violations, r.sandwich_violations, r.spacing_violations})
    append(run.data, static_cast<double>(v));
  append(run.data, r.mean_spacing);
  append(run.data, r.worst_spacing);
  const double b = 0.01;
  const bool ok = r.rate(r.flux_violations) < b && r.rate(r.displacement_violations) < b &&
                  r.rate(r.sandwich_violations) < b && r.rate(r.spacing_violations) < b;
  run.outcome = {ok, fmt("violation rates: flux %.4f, displacement %.4f, sandwich %.4f, spacing %.4f (bound 0.01); "
                         "spacing mean %.2f, worst %d vs n^0.3 = %.2f",
                         r.rate(r.flux_violations), r.rate(r.displacement_violations), r.rate(r.sandwich_violations),
                         r.rate(r.spacing_violations), r.mean_spacing, r.worst_spacing, std::pow(4096.0, 0.3))};
  return run;
}

SamplerRun insertion_distance(unsigned workers) {
  SamplerRun run;
  bool ok = true;
  std::string detail;
  for (int n : {50, 100, 200}) {
    const auto ds = parallel_map(100, workers, [&](std::size_t i) {
      RngStream rng(13013 + static_cast<std::uint64_t>(n), i);
      std::vector<int> v(static_cast<std::size_t>(n));
      for (int j = 0; j < n; ++j) v[j] = j + 1;
      for (int j = n - 1; j > 0; --j) std::swap(v[j], v[rng.below(static_cast<std::uint64_t>(j) + 1)]);
      const Permutation p(std::move(v));
      const Cell c{static_cast<int>(rng.below(static_cast<std::uint64_t>(n) + 1)) + 1,
                   static_cast<int>(rng.below(static_cast<std::uint64_t>(n) + 1)) + 1};
      return d_square_grid(grid_cdf(p, n), grid_cdf(insert(p, c), n));
    });
    double worst = 0;
    for (double d : ds) {
      worst = std::max(worst, d);
      append(run.data, d);
    }
    ok = ok && worst <= 6.0 / n;
    detail += fmt(" n=%d: max n*d = %.3f;", n, worst * n);
  }
  run.outcome = {ok, "grid distance after one insertion, bound 6/n:" + detail};
  return run;
}

std::uint64_t fnv(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"recordlab acceptance suite"};
  unsigned workers = 1;
  std::vector<int> only;
  app.add_option("--workers", workers, "Worker threads for the primary run")->check(CLI::PositiveNumber);
  app.add_option("--only", only, "Run only these criteria (14 needs the sampler criteria)");
  CLI11_PARSE(app, argc, argv);
  const std::set<int> selected(only.begin(), only.end());
  auto wanted = [&](int id) { return selected.empty() || selected.count(id); };

  int failures = 0;
  auto report = [&](int id, const std::string& name, const Outcome& o, double seconds) {
    std::printf("%s %2d %-28s %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", id, name.c_str(), o.detail.c_str(), seconds);
    std::fflush(stdout);
    failures += !o.pass;
  };
  auto timed = [](auto&& f) {
    const auto start = std::chrono::steady_clock::now();
    auto result = f();
    return std::pair{std::move(result),
                     std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()};
  };

  const std::vector<std::pair<int, std::pair<const char*, std::function<Outcome()>>>> exact = {
      {1, {"exact square counts", exact_square_counts}},
      {2, {"sixteen patterns", sixteen_patterns}},
      {3, {"bumping identity", bumping_identity}},
      {4, {"multiplicity law", multiplicity_law}},
      {5, {"projection roundtrip", projection_roundtrip}},
      {6, {"excursion moments", excursion_moments}},
  };
  for (const auto& [id, entry] : exact) {
    if (!wanted(id)) continue;
    auto [o, s] = timed(entry.second);
    report(id, entry.first, o, s);
  }

  const std::vector<std::pair<int, std::pair<const char*, std::function<SamplerRun(unsigned)>>>> sampled = {
      {7, {"anchor law", anchor_law}},
      {9, {"anchor concentration", concentration}},
      {10, {"fluctuation mean", fluctuation_mean}},
      {11, {"biased area", biased_area}},
      {12, {"inequality suite", inequality_rates}},
      {13, {"insertion distance", insertion_distance}},
  };
  std::map<int, std::string> digests;
  for (const auto& [id, entry] : sampled) {
    if (id == 9 && wanted(8)) {
      auto [o, s] = timed(ratio_trend);
      report(8, "exact/asymptotic trend", o, s);
    }
    if (!wanted(id)) continue;
    auto [run, s] = timed([&] { return entry.second(workers); });
    report(id, entry.first, run.outcome, s);
    digests[id] = run.data;
  }

  if (wanted(14) && !digests.empty()) {
    const unsigned other = workers == 1 ? 2 : 1;
    std::string detail;
    bool ok = true;
    const auto start = std::chrono::steady_clock::now();
    for (const auto& [id, entry] : sampled) {
      if (!digests.count(id)) continue;
      const auto again = entry.second(other);
      const bool same = again.data == digests[id];
      ok = ok && same;
      detail += fmt(" %d:%016llx%s", id, static_cast<unsigned long long>(fnv(digests[id])), same ? "" : "(differs)");
    }
    report(14, "determinism",
           {ok, fmt("raw sample data with %u vs %u workers identical:", workers, other) + detail},
           std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
  }

  std::printf("%s: %d criterion(s) failed\n", failures ? "FAILED" : "OK", failures);
  return failures ? 1 : 0;
}
