#pragma once

// Command line front end: configuration parsing, subcommand dispatch and
// report emission. main() lives in recordlab.cpp; tests drive run() directly.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "io.hpp"
#include "json.hpp"
#include "recordlab/checks.hpp"
#include "recordlab/counting.hpp"
#include "recordlab/excursion.hpp"
#include "recordlab/golden.hpp"
#include "recordlab/permuton.hpp"
#include "recordlab/projection.hpp"
#include "recordlab/sampling.hpp"
#include "recordlab/version.hpp"

namespace recordlab::cli {

inline const std::vector<std::string>& commands() {
  static const std::vector<std::string> names = {"count",          "enumerate",          "sample",
                                                 "anchor-stats",   "permuton-distance",  "fluctuation-stats",
                                                 "excursion-moments", "petrov-check"};
  return names;
}

struct ExperimentConfig {
  std::string command;
  int n = 0;  // 0: not given
  int k = 0;
  std::size_t samples = 1000;
  std::uint64_t seed = 1;
  int grid = 64;
  std::optional<double> delta_exp;
  std::string format = "csv";
  std::string out;  // output directory; empty falls back to RECORDLAB_OUT_DIR, then stdout
  unsigned workers = 1;
  std::string method = "exact";  // exact | snis
  std::string family = "asq";    // asq | av321
  std::string input;
  std::optional<double> tolerance;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunReport {
  ExperimentConfig config;
  io::Table table;
  nlohmann::ordered_json statistics = nlohmann::ordered_json::object();
  bool pass = true;
  double elapsed_seconds = 0;
};

inline nlohmann::ordered_json config_json(const ExperimentConfig& c) {
  nlohmann::ordered_json j;
  j["command"] = c.command;
  j["n"] = c.n;
  j["k"] = c.k;
  j["samples"] = c.samples;
  j["seed"] = c.seed;
  j["grid"] = c.grid;
  j["delta_exp"] = c.delta_exp ? nlohmann::ordered_json(*c.delta_exp) : nlohmann::ordered_json(nullptr);
  j["format"] = c.format;
  j["workers"] = c.workers;
  j["method"] = c.method;
  j["family"] = c.family;
  j["input"] = c.input;
  j["tolerance"] = c.tolerance ? nlohmann::ordered_json(*c.tolerance) : nlohmann::ordered_json(nullptr);
  return j;
}

namespace detail {

inline void require(bool ok, const std::string& message) {
  if (!ok) throw UsageError(message);
}

inline void require_n(const ExperimentConfig& c, int min_n = 1) {
  require(c.n >= min_n, c.command + " requires --n >= " + std::to_string(min_n));
}

inline std::string str(const ExactCount& x) { return x.str(); }

inline RegularityParams regularity_params(const ExperimentConfig& c, int n) {
  RegularityParams p = RegularityParams::defaults(n, c.k);
  if (c.delta_exp) p.delta_n = static_cast<long>(std::ceil(std::pow(static_cast<double>(n), *c.delta_exp)));
  return p;
}

// Exact or weighted draws of the configured family; index i uses stream i.
struct Draw {
  Permutation perm;
  std::uint64_t proposals = 1;
  double log_weight = 0;
  bool accepted = true;
};

inline std::vector<Draw> draw_samples(const ExperimentConfig& c) {
  if (c.method == "snis") {
    require(c.family == "asq", "--method snis is available for --family asq only");
    const auto ws = sample_asq_snis(c.n, c.k, c.seed, c.samples, c.workers);
    std::vector<Draw> out;
    out.reserve(ws.size());
    for (const auto& w : ws) out.push_back({w.object, 1, w.log_weight, w.accepted});
    return out;
  }
  const bool av = c.family == "av321";
  return draw_many(c.samples, c.seed, c.workers, [&](RngStream& rng) {
    const ExactDraw d = av ? sample_asq_av321_exact_counted(c.n, c.k, rng) : sample_asq_exact_counted(c.n, c.k, rng);
    return Draw{d.perm, d.proposals, 0.0, true};
  });
}

inline double effective_sample_size(const std::vector<Draw>& draws) {
  double mx = -std::numeric_limits<double>::infinity();
  for (const auto& d : draws)
    if (d.accepted) mx = std::max(mx, d.log_weight);
  double sw = 0, sw2 = 0;
  for (const auto& d : draws) {
    if (!d.accepted) continue;
    const double w = std::exp(d.log_weight - mx);
    sw += w;
    sw2 += w * w;
  }
  return sw2 > 0 ? sw * sw / sw2 : 0.0;
}

inline std::vector<double> weights(const std::vector<Draw>& draws) {
  double mx = -std::numeric_limits<double>::infinity();
  for (const auto& d : draws)
    if (d.accepted) mx = std::max(mx, d.log_weight);
  std::vector<double> w;
  for (const auto& d : draws) w.push_back(d.accepted ? std::exp(d.log_weight - mx) : 0.0);
  return w;
}

// ---------------------------------------------------------------------------

inline void run_count(const ExperimentConfig& c, RunReport& r) {
  require_n(c);
  require(c.k >= 0, "--k must be nonnegative");
  r.table.columns = {"n",     "k",     "filter",       "bumping",       "closed_form",
                     "asymptotic", "ratio", "av321_filter", "av321_bumping", "av321_asymptotic"};
  bool agree = true;
  for (int k = 0; k <= c.k; ++k) {
    std::optional<ExactCount> filter, bumping, closed, av_filter, av_bumping;
    if (c.n + k <= 11) {
      const auto h = internal_histogram(c.n + k, k);
      filter = h.all[static_cast<std::size_t>(k)];
      av_filter = h.av321[static_cast<std::size_t>(k)];
    }
    if (c.n <= 10 && k <= 4) {
      bumping = count_asq_bumping(c.n, k, c.workers);
      av_bumping = count_asq_av321_bumping(c.n, k, c.workers);
    }
    if (k == 0 && c.n >= 4) closed = count_sq_exact(c.n);
    std::set<ExactCount> seen, av_seen;
    for (const auto* v : {&filter, &bumping, &closed})
      if (*v) seen.insert(**v);
    for (const auto* v : {&av_filter, &av_bumping})
      if (*v) av_seen.insert(**v);
    agree = agree && seen.size() <= 1 && av_seen.size() <= 1;
    const double asym = asq_asymptotic(c.n, k).value();
    const double av_asym = asq_av321_asymptotic(c.n, k).value();
    auto cell = [](const std::optional<ExactCount>& v) -> io::Value { return v ? str(*v) : std::string(); };
    io::Value ratio = std::string();
    if (!seen.empty()) ratio = to_double(*seen.begin()) / asym;
    r.table.add({std::int64_t{c.n}, std::int64_t{k}, cell(filter), cell(bumping), cell(closed), asym, ratio,
                 cell(av_filter), cell(av_bumping), av_asym});
  }
  r.statistics["methods_agree"] = agree;
  r.pass = agree;
}

inline void run_enumerate(const ExperimentConfig& c, RunReport& r) {
  require_n(c);
  require(c.k >= 0, "--k must be nonnegative");
  require(c.family == "asq" || c.family == "av321", "--family must be asq or av321");
  const bool av = c.family == "av321";
  if (c.k == 0) require(c.n <= 12, "enumerate supports n <= 12 for k = 0");
  else require(c.n + c.k <= 10, "enumerate supports n + k <= 10 for k > 0");
  std::set<Permutation> found;
  const auto exteriors = av ? enumerate_av321(c.n) : enumerate_sq(c.n);
  if (c.k == 0) {
    found.insert(exteriors.begin(), exteriors.end());
  } else {
    for (const auto& s : exteriors) {
      auto part = asq_from(s, c.k);
      found.insert(part.begin(), part.end());
    }
  }
  r.table.columns = {"id", "permutation", "anchor", "internal_cells"};
  std::int64_t id = 0;
  for (const auto& p : found)
    r.table.add({id++, p.str(), std::int64_t{p.position_of(1)}, std::int64_t{internal_cell_count(p)}});
  r.statistics["count"] = found.size();
}

inline void run_sample(const ExperimentConfig& c, RunReport& r) {
  require_n(c);
  const auto draws = draw_samples(c);
  r.table.columns = {"id", "permutation", "proposals", "log_weight", "accepted", "anchor"};
  std::uint64_t proposals = 0;
  for (std::size_t i = 0; i < draws.size(); ++i) {
    const auto& d = draws[i];
    proposals += d.proposals;
    r.table.add({static_cast<std::int64_t>(i), d.perm.str(), static_cast<std::int64_t>(d.proposals), d.log_weight,
                 d.accepted, anchor_fraction(d.perm)});
  }
  r.statistics["samples"] = draws.size();
  r.statistics["proposals"] = proposals;
  if (c.method == "snis") r.statistics["n_eff"] = effective_sample_size(draws);
  else r.statistics["acceptance_rate"] = proposals ? static_cast<double>(draws.size()) / proposals : 0.0;
}

// anchor-stats and permuton-distance share the per-sample table.
inline void anchor_table(const ExperimentConfig& c, RunReport& r, const std::vector<Draw>& draws) {
  require(c.grid >= 2, "--grid must be at least 2");
  const auto w = weights(draws);
  const auto dist = parallel_map(draws.size(), c.workers, [&](std::size_t i) {
    const double z = anchor_fraction(draws[i].perm);
    return d_square_grid(grid_cdf(draws[i].perm, c.grid), grid_cdf(RectangleMeasureZ(z), c.grid));
  });
  r.table.columns = {"sample_id", "anchor", "distance"};
  double sw = 0, s_dist = 0, s_dev = 0;
  for (std::size_t i = 0; i < draws.size(); ++i) {
    const double z = anchor_fraction(draws[i].perm);
    r.table.add({static_cast<std::int64_t>(i), z, dist[i]});
    sw += w[i];
    s_dist += w[i] * dist[i];
    s_dev += w[i] * std::abs(z - 0.5);
  }
  r.statistics["mean_distance"] = sw > 0 ? s_dist / sw : 0.0;
  r.statistics["mean_abs_anchor_deviation"] = sw > 0 ? s_dev / sw : 0.0;
  r.statistics["n_eff"] = effective_sample_size(draws);
}

inline void run_anchor_stats(const ExperimentConfig& c, RunReport& r) {
  require_n(c);
  const auto draws = draw_samples(c);
  anchor_table(c, r, draws);
  if (c.method == "exact") {
    std::vector<double> z;
    for (const auto& d : draws) z.push_back(anchor_fraction(d.perm));
    const double ks = ks_statistic(z, [k = c.k](double s) { return anchor_cdf(k, s); });
    r.statistics["ks_statistic"] = ks;
    if (c.tolerance) r.pass = ks < *c.tolerance;
  } else {
    r.statistics["ks_statistic"] = nullptr;
    if (c.tolerance) r.pass = r.statistics["mean_abs_anchor_deviation"].get<double>() < *c.tolerance;
  }
  r.statistics["anchor_law"] = "Beta(" + std::to_string(c.k + 1) + "," + std::to_string(c.k + 1) + ")";
}

inline void run_permuton_distance(const ExperimentConfig& c, RunReport& r) {
  if (!c.input.empty()) {
    const Permutation p = Permutation::parse(c.input);
    anchor_table(c, r, {Draw{p}});
  } else {
    require_n(c);
    anchor_table(c, r, draw_samples(c));
  }
  if (c.tolerance) r.pass = r.statistics["mean_distance"].get<double>() < *c.tolerance;
}

inline void run_fluctuation_stats(const ExperimentConfig& c, RunReport& r) {
  require_n(c);
  require(c.k >= 0, "--k must be nonnegative");
  struct Row {
    std::int64_t area = 0;
    double normalized = 0;
    int max_height = 0;
    long flux = 0;
    double integral = 0, sup = 0;
    std::uint64_t proposals = 1;
  };
  const auto rows = parallel_map(c.samples, c.workers, [&](std::size_t i) {
    RngStream rng(c.seed, i);
    Row row;
    Permutation p;
    if (c.k == 0) {
      p = sample_av321(c.n, rng);
    } else {
      const ExactDraw d = sample_asq_av321_exact_counted(c.n, c.k, rng);
      p = d.perm;
      row.proposals = d.proposals;
    }
    const Permutation ext = c.k == 0 ? p : exterior(p);
    const DyckPath path = bjs_to_path(ext);
    const FluxReport fx = flux_check(ext, path);
    const FluctuationPath f = fluctuation(p, c.k);
    row.area = area_i64(path);
    row.normalized = normalized_area(path);
    row.max_height = max_height(path);
    row.flux = std::max(fx.max_plus, fx.max_minus);
    row.integral = f.integral();
    row.sup = f.sup();
    return row;
  });
  r.table.columns = {"sample_id", "n", "area", "normalized_area", "max_height", "flux_max", "integral_F", "sup_F"};
  std::vector<double> integrals;
  std::uint64_t proposals = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& row = rows[i];
    r.table.add({static_cast<std::int64_t>(i), std::int64_t{c.n}, row.area, row.normalized,
                 std::int64_t{row.max_height}, static_cast<std::int64_t>(row.flux), row.integral, row.sup});
    integrals.push_back(row.integral);
    proposals += row.proposals;
  }
  double mean = 0, var = 0;
  for (double x : integrals) mean += x;
  mean /= static_cast<double>(integrals.size());
  for (double x : integrals) var += (x - mean) * (x - mean);
  const double se = integrals.size() > 1 ? std::sqrt(var / (integrals.size() - 1) / integrals.size()) : 0.0;
  const double target = biased_area_target(c.k);
  r.statistics["mean_integral_F"] = mean;
  r.statistics["se_integral_F"] = se;
  r.statistics["target"] = target;
  r.statistics["z_score"] = se > 0 ? (mean - target) / se : 0.0;
  r.statistics["acceptance_rate"] = proposals ? static_cast<double>(rows.size()) / proposals : 0.0;
  if (c.tolerance) r.pass = se > 0 && std::abs(mean - target) / se <= *c.tolerance;
}

inline void run_excursion_moments(const ExperimentConfig& c, RunReport& r) {
  require(c.k >= 1, "excursion-moments requires --k >= 1");
  const auto table = excursion_moment_table(c.k + 2);
  r.table.columns = {"k", "xi", "moment"};
  for (int k = 1; k <= c.k; ++k) {
    const auto& m = table[static_cast<std::size_t>(k)];
    std::ostringstream xi;
    xi << m.xi;
    r.table.add({std::int64_t{k}, xi.str(), m.value});
  }
  bool log_convex = true;
  for (int k = 0; k + 2 < static_cast<int>(table.size()); ++k)
    log_convex = log_convex && table[k].value * table[k + 2].value >= table[k + 1].value * table[k + 1].value;
  r.statistics["log_convex"] = log_convex;
  r.pass = log_convex;
}

inline void run_petrov_check(const ExperimentConfig& c, RunReport& r) {
  r.table.columns = {"sample_id", "z0", "good", "petrov", "anchor_in_window", "regular"};
  if (!c.input.empty()) {
    const bool is_pair = c.input.find_first_of("DULR") != std::string::npos;
    AnchoredPair a;
    if (is_pair) {
      a = AnchoredPair::parse(c.input);
    } else {
      const Permutation p = Permutation::parse(c.input);
      require(is_square(p), "petrov-check input permutation must be square");
      a = project(p);
    }
    const RegularityParams rp = regularity_params(c, a.size());
    const bool good = is_good(a), pv = petrov(a);
    const bool window = a.z0 > rp.delta_n && a.z0 < a.size() - rp.delta_n;
    r.table.add({std::int64_t{0}, std::int64_t{a.z0}, good, pv, window, pv && window});
    r.statistics["delta_n"] = rp.delta_n;
    r.pass = pv;
    return;
  }
  require_n(c, 2);
  const RegularityParams rp = regularity_params(c, c.n);
  struct Row {
    int z0;
    bool petrov, window;
  };
  std::size_t regular = 0, pv = 0, window = 0;
  const auto draws = parallel_map(c.samples, c.workers, [&](std::size_t i) {
    RngStream rng(c.seed, i);
    const Permutation p = sample_square(c.n, rng);
    const AnchoredPair a = project(p);
    return Row{a.z0, petrov(a), a.z0 > rp.delta_n && a.z0 < c.n - rp.delta_n};
  });
  for (std::size_t i = 0; i < draws.size(); ++i) {
    const auto& d = draws[i];
    r.table.add({static_cast<std::int64_t>(i), std::int64_t{d.z0}, true, d.petrov, d.window, d.petrov && d.window});
    pv += d.petrov;
    window += d.window;
    regular += d.petrov && d.window;
  }
  const double nn = static_cast<double>(draws.size());
  r.statistics["delta_n"] = rp.delta_n;
  r.statistics["petrov_frequency"] = pv / nn;
  r.statistics["window_frequency"] = window / nn;
  r.statistics["regular_frequency"] = regular / nn;
  if (c.tolerance) r.pass = regular / nn >= *c.tolerance;
}

}  // namespace detail

inline void validate(const ExperimentConfig& c) {
  using detail::require;
  const auto& names = commands();
  require(std::find(names.begin(), names.end(), c.command) != names.end(), "unknown subcommand '" + c.command + "'");
  require(c.n >= 0, "--n must be nonnegative");
  require(c.k >= 0, "--k must be nonnegative");
  require(c.samples >= 1, "--samples must be positive");
  require(c.grid >= 2, "--grid must be at least 2");
  require(c.workers >= 1, "--workers must be positive");
  require(c.format == "csv" || c.format == "jsonl", "--format must be csv or jsonl");
  require(c.method == "exact" || c.method == "snis", "--method must be exact or snis");
  require(c.family == "asq" || c.family == "av321", "--family must be asq or av321");
  if (c.delta_exp) require(*c.delta_exp > 0 && *c.delta_exp < 1, "--delta-exp must lie in (0,1)");
}

inline RunReport run(const ExperimentConfig& config) {
  validate(config);
  RunReport r;
  r.config = config;
  const auto start = std::chrono::steady_clock::now();
  const std::string& cmd = config.command;
  try {
    if (cmd == "count") detail::run_count(config, r);
    else if (cmd == "enumerate") detail::run_enumerate(config, r);
    else if (cmd == "sample") detail::run_sample(config, r);
    else if (cmd == "anchor-stats") detail::run_anchor_stats(config, r);
    else if (cmd == "permuton-distance") detail::run_permuton_distance(config, r);
    else if (cmd == "fluctuation-stats") detail::run_fluctuation_stats(config, r);
    else if (cmd == "excursion-moments") detail::run_excursion_moments(config, r);
    else if (cmd == "petrov-check") detail::run_petrov_check(config, r);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  r.elapsed_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

inline nlohmann::ordered_json summary(const RunReport& r, const std::string& data_file) {
  nlohmann::ordered_json j;
  j["command"] = r.config.command;
  j["version"] = std::string(kVersion);
  j["golden_version"] = std::string(golden::kVersion);
  j["golden_hash"] = golden::hash();
  j["seed"] = r.config.seed;
  j["config"] = config_json(r.config);
  j["pass"] = r.pass;
  j["rows"] = r.table.rows.size();
  j["data_file"] = data_file;
  j["elapsed_seconds"] = r.elapsed_seconds;
  j["statistics"] = r.statistics;
  return j;
}

struct EmittedFiles {
  std::filesystem::path data;
  std::filesystem::path summary;
};

/// Output directory: --out, then RECORDLAB_OUT_DIR; empty means stdout.
inline std::string output_directory(const ExperimentConfig& c) {
  if (!c.out.empty()) return c.out;
  if (const char* env = std::getenv("RECORDLAB_OUT_DIR")) return env;
  return {};
}

/// Writes <dir>/<command>.<csv|jsonl> and <dir>/<command>.summary.json, or
/// the data to `out` and the summary to `err` when no directory is set.
inline EmittedFiles emit(const RunReport& r, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  const io::Format f = io::parse_format(r.config.format);
  const std::string data = io::render(r.table, f);
  const std::string dir = output_directory(r.config);
  if (dir.empty()) {
    out << data;
    err << summary(r, "-").dump(2) << '\n';
    return {};
  }
  EmittedFiles files;
  files.data = std::filesystem::path(dir) / (r.config.command + "." + io::extension(f));
  files.summary = std::filesystem::path(dir) / (r.config.command + ".summary.json");
  io::write_atomic(files.data, data);
  io::write_atomic(files.summary, summary(r, files.data.string()).dump(2) + "\n");
  return files;
}

/// Builds the parser; options are shared by every subcommand so a flat
/// key=value config file can mirror them.
inline void configure(CLI::App& app, ExperimentConfig& c, std::optional<double>& delta, std::optional<double>& tol) {
  app.add_option("command", c.command, "Subcommand")->required()->check(CLI::IsMember(commands()));
  app.add_option("--n", c.n, "Number of external points");
  app.add_option("--k", c.k, "Number of internal points (moment order for excursion-moments)");
  app.add_option("--samples", c.samples, "Number of samples or proposals");
  app.add_option("--seed", c.seed, "Base seed");
  app.add_option("--grid", c.grid, "Grid resolution for rectangle distances");
  app.add_option("--delta-exp", delta, "Override the anchor window: delta_n = ceil(n^e)");
  app.add_option("--format", c.format, "csv or jsonl")->check(CLI::IsMember({"csv", "jsonl"}));
  app.add_option("--out", c.out, "Output directory");
  app.add_option("--workers", c.workers, "Worker threads");
  app.add_option("--method", c.method, "exact or snis")->check(CLI::IsMember({"exact", "snis"}));
  app.add_option("--family", c.family, "asq or av321")->check(CLI::IsMember({"asq", "av321"}));
  app.add_option("--input", c.input, "Permutation or anchored pair to check");
  app.add_option("--tolerance", tol, "Threshold for the subcommand's check");
  app.set_config("--config", "", "Flat key=value file mirroring the flags");
  app.allow_config_extras(CLI::config_extras_mode::error);
}

/// Full command line entry point. Exit codes: 0 success, 1 usage error,
/// 2 check failure.
inline int main_entry(int argc, const char* const* argv, std::ostream& out = std::cout,
                      std::ostream& err = std::cerr) {
  CLI::App app{"recordlab: records, square permutations and internal points"};
  ExperimentConfig config;
  std::optional<double> delta, tol;
  configure(app, config, delta, tol);
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  config.delta_exp = delta;
  config.tolerance = tol;
  try {
    const RunReport report = run(config);
    emit(report, out, err);
    return report.pass ? 0 : 2;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace recordlab::cli
