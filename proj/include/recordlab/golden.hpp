#pragma once

// Frozen reference tables. Counts were produced by filtering S_{n+k} and
// cross-checked against the insertion-sequence sum; tests recompute both.

#include <array>
#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>

namespace recordlab::golden {

inline constexpr std::string_view kVersion = "recordlab-goldens-1";

struct CountRow {
  int n;
  int k;
  std::string_view asq;    // |ASq(n,k)|
  std::string_view av321;  // |ASq(Av_n(321),k)|
};

// All (n, k) with n + k <= 10, k <= 3.
inline constexpr std::array<CountRow, 33> kCounts{{
    {2, 0, "2", "2"},          {1, 1, "0", "0"},          {3, 0, "6", "5"},
    {2, 1, "0", "0"},          {1, 2, "0", "0"},          {4, 0, "24", "14"},
    {3, 1, "0", "0"},          {2, 2, "0", "0"},          {1, 3, "0", "0"},
    {5, 0, "104", "42"},       {4, 1, "16", "9"},         {3, 2, "0", "0"},
    {2, 3, "0", "0"},          {6, 0, "464", "132"},      {5, 1, "224", "86"},
    {4, 2, "32", "18"},        {3, 3, "0", "0"},          {7, 0, "2088", "429"},
    {6, 1, "2088", "548"},     {5, 2, "768", "292"},      {4, 3, "96", "54"},
    {8, 0, "9392", "1430"},    {7, 1, "16096", "2948"},   {6, 2, "11056", "2832"},
    {5, 3, "3392", "1284"},    {9, 0, "42064", "4862"},   {8, 1, "110576", "14505"},
    {7, 2, "122352", "21399"}, {6, 3, "67664", "17116"},  {10, 0, "187296", "16796"},
    {9, 1, "701824", "67672"}, {8, 2, "1144032", "139648"}, {7, 3, "993216", "169252"},
}};

struct RatioRow {
  int n;
  std::string_view exact;  // |ASq(n,1)|
  double ratio;            // exact / (k! 2^{k+1} n^{2k+1} 4^{n-3} / (2k+1)!) at k = 1
};

inline constexpr std::array<RatioRow, 5> kRatiosK1{{
    {5, "224", 0.16799999999999993},
    {6, "2088", 0.22656250000000006},
    {7, "16096", 0.27496355685131191},
    {8, "110576", 0.31636047363281233},
    {9, "701824", 0.35255915637860147},
}};

/// Relative tolerance for recomputed ratios (floating evaluation of the
/// asymptotic formula).
inline constexpr double kRatioTolerance = 1e-12;

/// FNV-1a over a canonical rendering of every table plus the version.
inline std::string hash() {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&](std::string_view s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
  };
  mix(kVersion);
  for (const auto& r : kCounts) {
    mix(std::to_string(r.n) + ',' + std::to_string(r.k) + ',');
    mix(r.asq);
    mix(",");
    mix(r.av321);
    mix("\n");
  }
  char buf[32];
  for (const auto& r : kRatiosK1) {
    std::snprintf(buf, sizeof buf, "%.17g", r.ratio);
    mix(std::to_string(r.n) + ',');
    mix(r.exact);
    mix(",");
    mix(buf);
    mix("\n");
  }
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace recordlab::golden
