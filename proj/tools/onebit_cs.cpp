// onebit-cs: seeded benchmark sweeps, Monte-Carlo law checks and one-shot
// recovery for 1-bit compressed sensing.
//
// Exit codes: 0 success, 1 config/usage error, 2 I/O error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "onebit.hpp"
#include "onebit/bench/config.hpp"
#include "onebit/bench/sweep.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitIo = 2;

int exit_code_for(const onebit::error& e) { return e.code() == onebit::errc::io ? kExitIo : kExitConfig; }

struct RunOptions {
  std::string experiment;
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trials;
  std::optional<std::size_t> threads;
  std::string out_path;
};

int cmd_run(const RunOptions& opt) {
  using namespace onebit::bench;
  const auto experiment = parse_experiment(opt.experiment);
  if (!experiment) {
    std::cerr << "unknown experiment '" << opt.experiment << "'\n";
    return kExitConfig;
  }
  SweepConfig config = opt.config_path.empty() ? SweepConfig::defaults(*experiment)
                                               : load_config(opt.config_path, experiment);
  if (opt.seed) config.base_seed = *opt.seed;
  if (opt.trials) config.trials = *opt.trials;
  if (opt.threads) config.threads = *opt.threads;
  config.validate();

  std::ofstream file;
  if (!opt.out_path.empty()) {
    file.open(opt.out_path, std::ios::binary);
    if (!file) throw onebit::error(onebit::errc::io, "cannot open output '" + opt.out_path + "'");
  }

  const auto records = run_sweep(config);
  std::ostream& csv = opt.out_path.empty() ? std::cout : file;
  std::ostream& summary = opt.out_path.empty() ? std::cerr : std::cout;
  write_csv(csv, records);
  if (file.is_open()) {
    file.flush();
    if (!file) throw onebit::error(onebit::errc::io, "failed writing '" + opt.out_path + "'");
  }
  write_summary(summary, aggregate(records));
  return kExitOk;
}

int cmd_verify_laws(std::size_t samples, std::uint64_t seed, std::size_t redraws) {
  using namespace onebit;
  if (samples < 1 || redraws < 1) {
    std::cerr << "samples and redraws must be positive\n";
    return kExitConfig;
  }
  const SparseSignal x(normalize(std::vector<double>{0.8, -0.6, 0.0, 0.36}));
  Rng rng(seed);
  double worst = 0.0;
  bool all_ok = true;
  for (double rho : {0.0, 0.1, 0.3}) {
    const auto check = check_flip_law(x, samples, rho, rng);
    std::cout << "flip law rho=" << format_double(rho) << "\n";
    for (std::size_t j = 0; j < x.n(); ++j) {
      std::cout << "  x_j=" << format_double(x[j]) << " empirical=" << format_double(check.empirical[j])
                << " predicted=" << format_double(check.predicted[j])
                << " tol=" << format_double(check.tolerance[j]) << "\n";
    }
    std::cout << "  max deviation " << format_double(check.max_deviation)
              << (check.within_tolerance ? " (within 4 sigma)" : " (EXCEEDS 4 sigma)") << "\n";
    worst = std::max(worst, check.max_deviation);
    all_ok = all_ok && check.within_tolerance;
  }

  // x_u - x_v = 0.3 with the remaining mass in a third coordinate.
  const SparseSignal pair(std::vector<double>{0.5, 0.2, std::sqrt(1.0 - 0.25 - 0.04)});
  const auto order = check_ordering_bound(pair, 0, 1, 1000, 0.1, redraws, rng);
  std::cout << "ordering m=1000 rho=0.1 eps=0.3: frequency=" << format_double(order.frequency)
            << " bound=" << format_double(order.bound)
            << (order.frequency >= order.bound ? " (holds)" : " (VIOLATED)") << "\n";
  all_ok = all_ok && order.frequency >= order.bound;
  std::cout << "max deviation " << format_double(worst) << "\n";
  std::cout << (all_ok ? "all checks passed" : "some checks failed") << "\n";
  return kExitOk;
}

int cmd_recover(const std::string& matrix_path, const std::string& bits_path, std::size_t k,
                const std::string& alpha_text) {
  using namespace onebit;
  std::ifstream matrix_in(matrix_path);
  if (!matrix_in) throw error(errc::io, "cannot open matrix '" + matrix_path + "'");
  std::ifstream bits_in(bits_path);
  if (!bits_in) throw error(errc::io, "cannot open bits '" + bits_path + "'");
  const auto a = bench::read_matrix_csv(matrix_in);
  const auto y = bench::read_bits_csv(bits_in);
  if (a.m() != y.size()) throw error(errc::io, "matrix rows and bit count differ");

  const HistoryParams params{k, bench::parse_alpha(alpha_text)};
  RecoveryResult res;
  try {
    res = history_recover(y, a, params);
  } catch (const error& e) {
    throw error(errc::config, e.what());
  }

  nlohmann::json out;
  out["status"] = to_string(res.status);
  out["alpha"] = res.alpha_used;
  out["candidate_support"] = res.candidate_support.indices;
  out["support"] = res.support;
  out["x_star"] = res.x_star;
  if (!res.message.empty()) out["message"] = res.message;
  std::cout << out.dump(2) << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"1-bit compressed sensing recovery and benchmarks"};
  app.require_subcommand(1);

  RunOptions run;
  auto* run_cmd = app.add_subcommand("run", "run a seeded experiment sweep and write CSV");
  run_cmd->add_option("experiment", run.experiment,
                      "alpha_sda | alpha_time | error_vs_m | error_vs_k | error_vs_rho | misspecified_k | runtime_table")
      ->required();
  run_cmd->add_option("--config", run.config_path, "JSON config; omitted keys take the experiment defaults");
  run_cmd->add_option("--seed", run.seed, "base seed (overrides config)");
  run_cmd->add_option("--trials", run.trials, "trials per grid point (overrides config)");
  run_cmd->add_option("--out", run.out_path, "CSV output path (default stdout)");
  run_cmd->add_option("--threads", run.threads, "worker threads (overrides config)");

  std::size_t samples = 200000;
  std::uint64_t law_seed = 1;
  std::size_t redraws = 2000;
  auto* laws_cmd = app.add_subcommand("verify-laws", "Monte-Carlo check of the flip-probability laws");
  laws_cmd->add_option("--samples", samples, "measurement rows per law check");
  laws_cmd->add_option("--seed", law_seed, "seed");
  laws_cmd->add_option("--redraws", redraws, "matrix redraws for the ordering bound");

  std::string matrix_path, bits_path, alpha_text = "adaptive";
  std::size_t k = 0;
  auto* rec_cmd = app.add_subcommand("recover", "one-shot recovery from CSV inputs");
  rec_cmd->add_option("--matrix", matrix_path, "CSV of reals, one row per measurement")->required();
  rec_cmd->add_option("--bits", bits_path, "CSV of +1/-1")->required();
  rec_cmd->add_option("--k", k, "sparsity")->required();
  rec_cmd->add_option("--alpha", alpha_text, "adaptive | adaptive:<alpha0>:<tau> | fixed:<alpha> | <alpha>");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*run_cmd) return cmd_run(run);
    if (*laws_cmd) return cmd_verify_laws(samples, law_seed, redraws);
    if (*rec_cmd) return cmd_recover(matrix_path, bits_path, k, alpha_text);
  } catch (const onebit::error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitConfig;
}
