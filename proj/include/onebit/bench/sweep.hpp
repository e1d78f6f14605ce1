#pragma once

#include <algorithm>
#include <atomic>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <thread>
#include <tuple>
#include <vector>

#include "../baselines.hpp"
#include "../error.hpp"
#include "../format.hpp"
#include "../history.hpp"
#include "../rng.hpp"
#include "../signal_model.hpp"

namespace onebit::bench {

enum class Experiment { alpha_sda, alpha_time, error_vs_m, error_vs_k, error_vs_rho, misspecified_k, runtime_table };

enum class Algorithm { history, biht_l2, passive };

inline constexpr Experiment kAllExperiments[] = {
    Experiment::alpha_sda,    Experiment::alpha_time,     Experiment::error_vs_m,   Experiment::error_vs_k,
    Experiment::error_vs_rho, Experiment::misspecified_k, Experiment::runtime_table};

inline std::string_view to_string(Experiment e) noexcept {
  switch (e) {
    case Experiment::alpha_sda: return "alpha_sda";
    case Experiment::alpha_time: return "alpha_time";
    case Experiment::error_vs_m: return "error_vs_m";
    case Experiment::error_vs_k: return "error_vs_k";
    case Experiment::error_vs_rho: return "error_vs_rho";
    case Experiment::misspecified_k: return "misspecified_k";
    case Experiment::runtime_table: return "runtime_table";
  }
  return "unknown";
}

inline std::string_view to_string(Algorithm a) noexcept {
  switch (a) {
    case Algorithm::history: return "history";
    case Algorithm::biht_l2: return "biht_l2";
    case Algorithm::passive: return "passive";
  }
  return "unknown";
}

inline std::optional<Experiment> parse_experiment(std::string_view s) {
  for (auto e : kAllExperiments)
    if (to_string(e) == s) return e;
  return std::nullopt;
}

inline std::optional<Algorithm> parse_algorithm(std::string_view s) {
  for (auto a : {Algorithm::history, Algorithm::biht_l2, Algorithm::passive})
    if (to_string(a) == s) return a;
  return std::nullopt;
}

struct SweepConfig {
  Experiment experiment = Experiment::error_vs_m;
  std::vector<std::size_t> n{1000};
  std::vector<std::size_t> k{10};
  std::vector<std::size_t> m{4000};
  std::vector<double> rho{0.1};
  std::size_t trials = 100;
  std::uint64_t base_seed = 0;
  std::vector<Algorithm> algorithms{Algorithm::history, Algorithm::biht_l2, Algorithm::passive};
  AlphaMode alpha_mode = AdaptiveAlpha{};
  /// HISTORY alpha settings compared by alpha_sda / alpha_time. Empty means
  /// alpha_mode only.
  std::vector<AlphaMode> alpha_variants;
  /// Sparsity handed to the algorithms. Empty means the true k.
  std::vector<std::size_t> k_select;
  std::size_t biht_max_iters = 200;
  double biht_step_size = 1.0;
  bool biht_stop_on_stall = true;
  std::size_t threads = 1;

  /// Grids for each experiment, following the published setups.
  static SweepConfig defaults(Experiment e) {
    SweepConfig c;
    c.experiment = e;
    switch (e) {
      case Experiment::alpha_sda:
      case Experiment::alpha_time:
        c.m = {200, 400, 800, 1500, 2000, 3000, 4000};
        c.algorithms = {Algorithm::history};
        c.alpha_variants = {AdaptiveAlpha{}, FixedAlpha{1}, FixedAlpha{2}, FixedAlpha{4}, FixedAlpha{8}};
        break;
      case Experiment::error_vs_m:
        c.m = {200, 400, 800, 1500, 2000, 3000, 4000};
        break;
      case Experiment::error_vs_k:
        c.k = {10, 25, 50, 100, 150, 200};
        break;
      case Experiment::error_vs_rho:
        c.rho = {0, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45};
        break;
      case Experiment::misspecified_k:
        c.k_select.clear();
        for (std::size_t s = 1; s <= 20; ++s) c.k_select.push_back(s);
        break;
      case Experiment::runtime_table:
        c.biht_max_iters = 100;
        c.biht_stop_on_stall = false;
        break;
    }
    return c;
  }

  void validate() const {
    auto fail = [](const std::string& msg) { throw error(errc::config, msg); };
    if (n.empty() || k.empty() || m.empty() || rho.empty()) fail("grids must be nonempty");
    if (trials < 1) fail("trials must be >= 1");
    if (algorithms.empty()) fail("at least one algorithm is required");
    if (threads < 1) fail("threads must be >= 1");
    if (biht_max_iters < 1) fail("biht_max_iters must be >= 1");
    if (!(biht_step_size > 0.0)) fail("biht_step_size must be positive");
    try {
      onebit::validate(alpha_mode);
      for (const auto& a : alpha_variants) onebit::validate(a);
    } catch (const error& e) {
      fail(e.what());
    }
    for (double r : rho)
      if (!(r >= 0.0 && r < 0.5)) fail("rho must lie in [0, 0.5)");
    for (std::size_t nn : n) {
      for (std::size_t kk : k) {
        if (kk < 1 || kk > nn) fail("k must satisfy 1 <= k <= n");
        for (std::size_t mm : m) {
          if (mm < 2) fail("m must be >= 2");
          const std::size_t upper = std::min(nn, mm - 1);
          if (k_select.empty()) {
            if (kk > upper) fail("k must not exceed min(n, m - 1)");
          } else {
            for (std::size_t ks : k_select)
              if (ks < 1 || ks > upper) fail("k_select must lie in [1, min(n, m - 1)]");
          }
        }
      }
    }
  }
};

/// One instance of the measurement model. All algorithms and all
/// algorithm-side settings (alpha variant, k_select) share it.
struct GridPoint {
  std::size_t m;
  std::size_t n;
  std::size_t k;
  double rho;
};

struct TrialRecord {
  std::string experiment;
  std::size_t m = 0;
  std::size_t n = 0;
  std::size_t k = 0;
  double rho = 0.0;
  std::size_t k_select = 0;
  std::string alpha;
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  std::string algorithm;
  double error = 0.0;
  double sda = 0.0;
  double time_s = 0.0;
  std::string status;
};

/// trial_seed = H(H(H(H(H(H(base_seed, fnv1a(experiment)), m), n), k), bits(rho)), trial)
/// with H = hash_combine (SplitMix64 based) and bits(rho) the IEEE-754 bit
/// pattern of rho.
inline std::uint64_t trial_seed(std::uint64_t base_seed, Experiment e, const GridPoint& p, std::size_t trial) {
  std::uint64_t h = hash_combine(base_seed, fnv1a(to_string(e)));
  h = hash_combine(h, p.m);
  h = hash_combine(h, p.n);
  h = hash_combine(h, p.k);
  h = hash_combine(h, std::bit_cast<std::uint64_t>(p.rho));
  return hash_combine(h, trial);
}

/// Grid points in nesting order m, n, k, rho.
inline std::vector<GridPoint> grid_points(const SweepConfig& c) {
  std::vector<GridPoint> out;
  for (std::size_t m : c.m)
    for (std::size_t n : c.n)
      for (std::size_t k : c.k)
        for (double rho : c.rho) out.push_back({m, n, k, rho});
  return out;
}

/// A generated trial instance. Draw order from the trial Rng: signal, matrix,
/// then one uniform per measurement for the flips.
struct TrialInstance {
  SparseSignal x;
  MeasurementEnsemble a;
  BitMeasurements y;
};

inline TrialInstance make_instance(const GridPoint& p, std::uint64_t seed) {
  Rng rng(seed);
  auto x = gen_sparse_signal(p.n, p.k, rng);
  auto a = gen_measurement_matrix(p.m, p.n, rng);
  auto clean = measure(a, x);
  auto y = apply_sign_flips(clean, p.rho, rng);
  return {std::move(x), std::move(a), std::move(y)};
}

namespace detail {

/// Streams the matrix once so every timed call starts from the same cache state.
inline double touch(const MeasurementEnsemble& a) {
  double acc = 0.0;
  for (double v : a.entries()) acc += v;
  return acc;
}

inline std::vector<TrialRecord> run_trial(const SweepConfig& c, const GridPoint& p, std::size_t trial) {
  const std::uint64_t seed = trial_seed(c.base_seed, c.experiment, p, trial);
  const TrialInstance inst = make_instance(p, seed);

  std::vector<std::size_t> selects = c.k_select;
  if (selects.empty()) selects.push_back(p.k);
  std::vector<AlphaMode> alphas = c.alpha_variants;
  if (alphas.empty()) alphas.push_back(c.alpha_mode);

  std::vector<TrialRecord> out;
  volatile double sink = 0.0;
  for (std::size_t ks : selects) {
    for (Algorithm alg : c.algorithms) {
      const std::size_t n_variants = alg == Algorithm::history ? alphas.size() : 1;
      for (std::size_t v = 0; v < n_variants; ++v) {
        TrialRecord rec;
        rec.experiment = std::string(to_string(c.experiment));
        rec.m = p.m;
        rec.n = p.n;
        rec.k = p.k;
        rec.rho = p.rho;
        rec.k_select = ks;
        rec.trial = trial;
        rec.seed = seed;
        rec.algorithm = std::string(to_string(alg));
        rec.alpha = alg == Algorithm::history ? describe(alphas[v]) : "none";

        sink = sink + touch(inst.a);
        RecoveryResult res;
        const auto start = onebit::detail::Clock::now();
        switch (alg) {
          case Algorithm::history:
            res = history_recover(inst.y, inst.a, HistoryParams{ks, alphas[v]});
            break;
          case Algorithm::biht_l2:
            res = biht_l2_recover(inst.y, inst.a,
                                  BihtParams{ks, c.biht_max_iters, c.biht_step_size, c.biht_stop_on_stall});
            break;
          case Algorithm::passive:
            res = passive_recover(inst.y, inst.a, PassiveParams::for_dimensions(ks, p.n, p.m));
            break;
        }
        rec.time_s = onebit::detail::seconds_since(start);
        rec.status = to_string(res.status);
        if (res.ok()) {
          rec.error = recovery_error(inst.x, res.x_star);
          rec.sda = support_detection_accuracy(inst.x.support(), res.support);
        } else {
          rec.error = 1.0;
          rec.sda = 0.0;
        }
        out.push_back(std::move(rec));
      }
    }
  }
  return out;
}

}  // namespace detail

/// Runs every (grid point, trial) and returns records ordered by grid point,
/// trial, k_select, algorithm, alpha variant, independent of thread count.
/// runtime_table always runs on one thread.
inline std::vector<TrialRecord> run_sweep(const SweepConfig& config) {
  config.validate();
  const auto points = grid_points(config);
  const std::size_t jobs = points.size() * config.trials;
  std::vector<std::vector<TrialRecord>> slots(jobs);

  std::size_t threads = config.experiment == Experiment::runtime_table ? 1 : config.threads;
  threads = std::min(threads, jobs);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t job = next.fetch_add(1);
      if (job >= jobs) return;
      try {
        slots[job] = detail::run_trial(config, points[job / config.trials], job % config.trials);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(jobs);
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<TrialRecord> out;
  for (auto& s : slots)
    for (auto& r : s) out.push_back(std::move(r));
  return out;
}

struct SummaryRow {
  std::string experiment;
  std::size_t m = 0;
  std::size_t n = 0;
  std::size_t k = 0;
  double rho = 0.0;
  std::size_t k_select = 0;
  std::string alpha;
  std::string algorithm;
  std::size_t trials = 0;
  std::size_t failures = 0;
  double mean_error = 0.0;
  double mean_sda = 0.0;
  double total_time_s = 0.0;
};

/// Means over trials per (grid point, k_select, alpha, algorithm), in first
/// appearance order. A record whose status is not "ok" counts as error 1 and
/// SDA 0 whatever its fields say.
inline std::vector<SummaryRow> aggregate(const std::vector<TrialRecord>& records) {
  if (records.empty()) throw error(errc::invalid_parameter, "aggregate: no records");
  using Key = std::tuple<std::string, std::size_t, std::size_t, std::size_t, double, std::size_t, std::string, std::string>;
  std::map<Key, std::size_t> index;
  std::vector<SummaryRow> rows;
  for (const auto& r : records) {
    Key key{r.experiment, r.m, r.n, r.k, r.rho, r.k_select, r.alpha, r.algorithm};
    auto [it, inserted] = index.try_emplace(key, rows.size());
    if (inserted) {
      SummaryRow s;
      s.experiment = r.experiment;
      s.m = r.m;
      s.n = r.n;
      s.k = r.k;
      s.rho = r.rho;
      s.k_select = r.k_select;
      s.alpha = r.alpha;
      s.algorithm = r.algorithm;
      rows.push_back(std::move(s));
    }
    auto& s = rows[it->second];
    const bool ok = r.status == "ok";
    ++s.trials;
    if (!ok) ++s.failures;
    s.mean_error += ok ? r.error : 1.0;
    s.mean_sda += ok ? r.sda : 0.0;
    s.total_time_s += r.time_s;
  }
  for (auto& s : rows) {
    s.mean_error /= static_cast<double>(s.trials);
    s.mean_sda /= static_cast<double>(s.trials);
  }
  return rows;
}

inline constexpr std::string_view kCsvHeader =
    "experiment,m,n,k,rho,k_select,alpha,trial,seed,algorithm,error,sda,time_s,status";

inline void write_csv_row(std::ostream& os, const TrialRecord& r) {
  os << r.experiment << ',' << r.m << ',' << r.n << ',' << r.k << ',' << format_double(r.rho) << ','
     << r.k_select << ',' << r.alpha << ',' << r.trial << ',' << r.seed << ',' << r.algorithm << ','
     << format_double(r.error) << ',' << format_double(r.sda) << ',' << format_double(r.time_s) << ','
     << r.status << '\n';
}

inline void write_csv(std::ostream& os, const std::vector<TrialRecord>& records) {
  os << kCsvHeader << '\n';
  for (const auto& r : records) write_csv_row(os, r);
}

inline void write_summary(std::ostream& os, const std::vector<SummaryRow>& rows) {
  os << "experiment,m,n,k,rho,k_select,alpha,algorithm,trials,failures,mean_error,mean_sda,total_time_s\n";
  for (const auto& s : rows) {
    os << s.experiment << ',' << s.m << ',' << s.n << ',' << s.k << ',' << format_double(s.rho) << ','
       << s.k_select << ',' << s.alpha << ',' << s.algorithm << ',' << s.trials << ',' << s.failures << ','
       << format_double(s.mean_error) << ',' << format_double(s.mean_sda) << ','
       << format_double(s.total_time_s) << '\n';
  }
}

}  // namespace onebit::bench
