#include "commands.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>
#include <fmt/ostream.h>
#include <json.hpp>

#include "kinship/error.hpp"
#include "kinship/lrstats.hpp"
#include "kinship/powerest.hpp"
#include "kinship/synth.hpp"

namespace kinship::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Failure after validation succeeded (exit code 3).
class RuntimeFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

template <typename Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const KinshipError& e) {
    fmt::print(err, "error: {}\n", e.what());
    return e.code() == ErrorCode::EmptySubpopSample ? kExitRuntime : kExitValidation;
  } catch (const RuntimeFailure& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitRuntime;
  } catch (const std::exception& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitRuntime;
  }
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw KinshipError(ErrorCode::InvalidArgument, "cannot open '" + path + "'");
  return in;
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw RuntimeFailure("cannot write '" + path.string() + "'");
  return out;
}

std::string alpha_tag(double alpha) { return fmt::format("{}", alpha); }

struct Simulation {
  std::shared_ptr<const FrequencyTable> table;
  ResolvedHypothesis hypothesis;
  SimConfig config;
  SampleMatrix null_samples;
  SampleMatrix alt_samples;
};

SimConfig make_config(const RunSpec& spec, std::shared_ptr<const FrequencyTable> table,
                      const ResolvedHypothesis& hyp) {
  SimConfig cfg;
  cfg.table = std::move(table);
  cfg.theta0 = hyp.theta0;
  cfg.theta1 = hyp.theta1;
  cfg.replicates = spec.paper_scale ? kPaperReplicates : spec.replicates;
  cfg.seed = spec.seed;
  cfg.statistics = parse_statistic_list(spec.stats);
  cfg.workers = spec.workers;
  cfg.cb_weights = spec.cb_weights ? parse_pool_weights(*spec.cb_weights)
                                   : default_pool_weights(*cfg.table);
  cfg.null_same_subpop = spec.null_same_subpop;
  cfg.validate();
  return cfg;
}

Simulation run_simulation(const RunSpec& spec) {
  Simulation sim;
  sim.table = std::make_shared<const FrequencyTable>(load_table(spec.source));
  sim.hypothesis = resolve_hypothesis(spec.hypothesis);
  sim.config = make_config(spec, sim.table, sim.hypothesis);
  sim.null_samples = simulate_null(sim.config);
  sim.alt_samples = simulate_alt(sim.config);
  if (spec.dump_samples) {
    fs::create_directories(spec.out_dir);
    auto n = open_output(fs::path(spec.out_dir) / "samples_null.csv");
    write_sample_csv(n, sim.null_samples);
    auto a = open_output(fs::path(spec.out_dir) / "samples_alt.csv");
    write_sample_csv(a, sim.alt_samples);
  }
  return sim;
}

std::vector<double> resolve_alphas(const RunSpec& spec, const ResolvedHypothesis& hyp) {
  std::vector<double> alphas = spec.alphas.empty() ? std::vector<double>{hyp.default_alpha}
                                                   : spec.alphas;
  for (double a : alphas) {
    if (!(a > 0.0) || !(a < 1.0)) {
      throw KinshipError(ErrorCode::InvalidArgument, fmt::format("alpha {} not in (0, 1)", a));
    }
  }
  return alphas;
}

void warn_small_alpha(double alpha, std::uint64_t replicates, std::ostream& err) {
  const double expected = alpha * static_cast<double>(replicates);
  if (expected < kStableQuantileCount) {
    fmt::print(err, "warning: AlphaTooSmallForB: alpha*B = {} < {} (alpha={}, B={})\n", expected,
               kStableQuantileCount, alpha, replicates);
  }
}

std::vector<std::string> subpop_names(const FrequencyTable& table) {
  std::vector<std::string> names;
  for (const auto& s : table.subpops()) names.push_back(s.name);
  return names;
}

json run_info(const Simulation& sim) {
  return {{"test", sim.hypothesis.name},
          {"theta0", {sim.hypothesis.theta0.z0(), sim.hypothesis.theta0.z1(),
                      sim.hypothesis.theta0.z2()}},
          {"theta1", {sim.hypothesis.theta1.z0(), sim.hypothesis.theta1.z1(),
                      sim.hypothesis.theta1.z2()}},
          {"replicates", sim.config.replicates},
          {"seed", sim.config.seed},
          {"cb_weights", std::string(to_string(sim.config.cb_weights))},
          {"null_same_subpop", sim.config.null_same_subpop},
          {"subpops", subpop_names(*sim.table)},
          {"loci", sim.table->num_loci()}};
}

json to_json(const PowerReport& r) {
  json per_subpop = json::array();
  for (const auto& sp : r.per_subpop) {
    per_subpop.push_back({{"subpop", sp.name},
                          {"power", sp.estimate.power},
                          {"n", sp.estimate.trials},
                          {"ci_low", sp.estimate.ci.low},
                          {"ci_high", sp.estimate.ci.high}});
  }
  return {{"statistic", std::string(to_string(r.statistic))},
          {"alpha", r.alpha},
          {"threshold", std::exp(r.threshold.log_value)},
          {"threshold_log", r.threshold.log_value},
          {"realized_fpr", r.threshold.realized_fpr()},
          {"unstable_threshold", r.threshold.unstable},
          {"power", r.power.power},
          {"successes", r.power.successes},
          {"trials", r.power.trials},
          {"ci_low", r.power.ci.low},
          {"ci_high", r.power.ci.high},
          {"per_subpop", per_subpop}};
}

}  // namespace

ResolvedHypothesis resolve_hypothesis(const HypothesisSpec& spec) {
  const ThetaIBD unrelated = ThetaIBD::unrelated();
  ResolvedHypothesis hyp{spec.test, unrelated, unrelated, kFullSibAlpha};
  if (spec.test == "parent-child") {
    hyp.theta1 = ThetaIBD::parent_child();
    hyp.default_alpha = kParentChildAlpha;
  } else if (spec.test == "full-sib") {
    hyp.theta1 = ThetaIBD::full_sib();
    hyp.default_alpha = kFullSibAlpha;
  } else if (spec.test == "half-sib-paper") {
    hyp.theta1 = ThetaIBD::half_sib_paper();
    hyp.default_alpha = kHalfSibAlpha;
  } else if (spec.test == "half-sib-standard") {
    hyp.theta1 = ThetaIBD::half_sib_standard();
    hyp.default_alpha = kHalfSibAlpha;
  } else if (spec.test == "custom") {
    if (!spec.theta1) {
      throw KinshipError(ErrorCode::InvalidArgument, "--test custom requires --theta1");
    }
  } else {
    throw KinshipError(ErrorCode::InvalidArgument, "unknown test '" + spec.test + "'");
  }
  if (spec.theta0) hyp.theta0 = ThetaIBD::parse(*spec.theta0);
  if (spec.theta1) hyp.theta1 = ThetaIBD::parse(*spec.theta1);
  return hyp;
}

FrequencyTable load_table(const TableSource& source) {
  if (source.meta_path.empty()) throw KinshipError(ErrorCode::InvalidArgument, "--meta is required");
  auto meta_in = open_input(source.meta_path);
  const TableMetadata meta = read_metadata(meta_in, source.meta_path);
  std::string freqs = source.freqs_path;
  if (freqs.empty()) {
    if (meta.freqs_path.empty()) {
      throw KinshipError(ErrorCode::InvalidArgument,
                         "no --freqs given and metadata has no 'freqs' entry");
    }
    const fs::path p(meta.freqs_path);
    freqs = p.is_absolute() ? p.string() : (fs::path(source.meta_path).parent_path() / p).string();
  }
  auto csv_in = open_input(freqs);
  return load_frequency_table(csv_in, meta, freqs);
}

int cmd_lr(const LrArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const FrequencyTable table = load_table(args.source);
    const ResolvedHypothesis hyp = resolve_hypothesis(args.hypothesis);
    auto in1 = open_input(args.profile1);
    auto in2 = open_input(args.profile2);
    const ProfilePair pair{read_profile_csv(in1, args.profile1),
                           read_profile_csv(in2, args.profile2)};
    const PoolWeights weights =
        args.cb_weights ? parse_pool_weights(*args.cb_weights) : default_pool_weights(table);
    LrBreakdown b;
    try {
      b = lr_all(pair, hyp.theta0, hyp.theta1, table, weights);
    } catch (const KinshipError& e) {
      throw KinshipError(e.code(), args.profile1 + " / " + args.profile2 + ": " + e.what());
    }

    fmt::print(out, "test: {}  theta0={}  theta1={}  cb_weights={}\n", hyp.name,
               to_string(hyp.theta0), to_string(hyp.theta1), to_string(weights));
    fmt::print(out, "{:<16} {:>14} {:>14} {:>14} {:>14}\n", "subpop", "logL(theta0)",
               "logL(theta1)", "log LR", "LR");
    for (std::size_t k = 0; k < table.num_subpops(); ++k) {
      const double r = b.subpop_log_lr(k);
      fmt::print(out, "{:<16} {:>14.6f} {:>14.6f} {:>14.6f} {:>14.6g}\n", table.subpops()[k].name,
                 b.loglik_null[k], b.loglik_alt[k], r, std::exp(r));
    }
    fmt::print(out, "\n{:<10} {:>14} {:>14}\n", "statistic", "log", "linear");
    for (Statistic s : kAllStatistics) {
      fmt::print(out, "{:<10} {:>14.6f} {:>14.6g}\n", to_string(s), b.value(s),
                 std::exp(b.value(s)));
    }
    return kExitOk;
  });
}

int cmd_power(const RunSpec& spec, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const ResolvedHypothesis hyp = resolve_hypothesis(spec.hypothesis);
    const auto alphas = resolve_alphas(spec, hyp);
    const std::uint64_t b = spec.paper_scale ? kPaperReplicates : spec.replicates;
    for (double a : alphas) {
      if (a * static_cast<double>(b) < 1.0) {
        throw RuntimeFailure(fmt::format(
            "alpha*B = {} < 1: the null sample cannot resolve alpha={} with B={}",
            a * static_cast<double>(b), a, b));
      }
      warn_small_alpha(a, b, err);
    }
    const Simulation sim = run_simulation(spec);
    const auto names = subpop_names(*sim.table);

    std::vector<PowerReport> reports;
    for (double a : alphas) {
      for (Statistic s : sim.config.statistics) {
        reports.push_back(power_report(sim.null_samples, sim.alt_samples, s, a, names));
      }
    }
    std::vector<PowerRow> rows;
    json jreports = json::array();
    for (const auto& r : reports) {
      rows.push_back(to_row(r));
      jreports.push_back(to_json(r));
    }

    fs::create_directories(spec.out_dir);
    {
      auto csv = open_output(fs::path(spec.out_dir) / "power.csv");
      write_power_csv(csv, rows);
      auto js = open_output(fs::path(spec.out_dir) / "power.json");
      js << json{{"run", run_info(sim)}, {"reports", jreports}}.dump(2) << '\n';
    }

    fmt::print(out, "test: {}  theta1={}  B={}  seed={}\n", sim.hypothesis.name,
               to_string(sim.hypothesis.theta1), sim.config.replicates, sim.config.seed);
    for (double a : alphas) {
      fmt::print(out, "\nalpha = {}\n{:<10} {:>14} {:>8} {:>22}\n", a, "Statistic", "Threshold",
                 "Power", "95% CI");
      for (const auto& r : reports) {
        if (r.alpha != a) continue;
        fmt::print(out, "{:<10} {:>14.1f} {:>8.3f} {:>22}\n", to_string(r.statistic),
                   std::exp(r.threshold.log_value), r.power.power,
                   fmt::format("({:.4f}, {:.4f})", r.power.ci.low, r.power.ci.high));
      }
    }
    return kExitOk;
  });
}

int cmd_power_curve(const RunSpec& spec, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const std::vector<double> grid = spec.alpha_grid.empty() ? default_alpha_grid()
                                                             : spec.alpha_grid;
    const Simulation sim = run_simulation(spec);
    std::size_t unstable = 0;
    std::vector<PowerCurve> curves;
    for (Statistic s : sim.config.statistics) {
      curves.push_back(power_curve(s, sim.null_samples.column(s), sim.alt_samples.column(s), grid));
    }
    for (double a : grid) {
      if (a * static_cast<double>(sim.config.replicates) < kStableQuantileCount) ++unstable;
    }
    if (unstable) {
      fmt::print(err, "warning: AlphaTooSmallForB: {} of {} grid points have alpha*B < {}\n",
                 unstable, grid.size(), kStableQuantileCount);
    }
    fs::create_directories(spec.out_dir);
    auto csv = open_output(fs::path(spec.out_dir) / "power_curve.csv");
    write_curve_csv(csv, curves);
    fmt::print(out, "test: {}  B={}  wrote {} curves x {} points to {}\n", sim.hypothesis.name,
               sim.config.replicates, curves.size(), grid.size(),
               (fs::path(spec.out_dir) / "power_curve.csv").string());
    return kExitOk;
  });
}

int cmd_subpop_bias(const RunSpec& spec, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    {
      const FrequencyTable table = load_table(spec.source);
      if (table.num_subpops() < 2) {
        throw KinshipError(ErrorCode::InvalidArgument, "subpop-bias requires >=2 subpopulations");
      }
    }
    const ResolvedHypothesis hyp = resolve_hypothesis(spec.hypothesis);
    const auto alphas = resolve_alphas(spec, hyp);
    const std::vector<double> grid = spec.alpha_grid.empty() ? default_alpha_grid()
                                                             : spec.alpha_grid;
    const Simulation sim = run_simulation(spec);
    for (double a : alphas) warn_small_alpha(a, sim.config.replicates, err);
    const auto names = subpop_names(*sim.table);
    fs::create_directories(spec.out_dir);

    for (std::size_t k = 0; k < names.size(); ++k) {
      std::vector<PowerCurve> curves;
      for (Statistic s : sim.config.statistics) {
        curves.push_back(subpop_power_curve(s, sim.null_samples.column(s), sim.alt_samples, k,
                                            grid, names[k]));
      }
      auto csv = open_output(fs::path(spec.out_dir) / ("subpop_curve_" + names[k] + ".csv"));
      write_curve_csv(csv, curves);
    }

    bool identity_ok = true;
    for (Statistic s : sim.config.statistics) {
      for (double a : alphas) {
        const PowerReport r = power_report(sim.null_samples, sim.alt_samples, s, a, names);
        std::vector<NamedDiffCI> rows;
        for (std::size_t i = 0; i < names.size(); ++i) {
          for (std::size_t j = i + 1; j < names.size(); ++j) {
            const auto& pi = r.per_subpop[i].estimate;
            const auto& pj = r.per_subpop[j].estimate;
            NamedDiffCI row{names[i], names[j],
                            power_diff_ci(pi.power, pi.trials, pj.power, pj.trials)};
            row.ci.subpop_i = i;
            row.ci.subpop_j = j;
            if (row.ci.small_sample) {
              fmt::print(err, "warning: SmallSampleWarning: {} vs {} has fewer than 30 pairs\n",
                         names[i], names[j]);
            }
            rows.push_back(std::move(row));
          }
        }
        auto csv = open_output(fs::path(spec.out_dir) /
                               fmt::format("diff_ci_{}_alpha{}.csv", to_string(s), alpha_tag(a)));
        write_diff_csv(csv, rows);

        std::uint64_t recombined = 0;
        std::uint64_t trials = 0;
        for (const auto& sp : r.per_subpop) {
          recombined += sp.estimate.successes;
          trials += sp.estimate.trials;
        }
        const bool ok = recombined == r.power.successes && trials == r.power.trials;
        identity_ok = identity_ok && ok;
        fmt::print(out, "self-test {} alpha={}: sum_k (n_k/B) power_k = {} vs power = {} [{}]\n",
                   to_string(s), a,
                   static_cast<double>(recombined) / static_cast<double>(sim.config.replicates),
                   r.power.power, ok ? "OK" : "MISMATCH");
      }
    }
    if (!identity_ok) throw RuntimeFailure("per-subpop power does not recombine to global power");
    return kExitOk;
  });
}

int cmd_synth_freqs(const SynthArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    SynthSpec spec;
    spec.subpop_names = args.subpops;
    spec.proportions = args.proportions;
    spec.sample_sizes = args.sample_sizes;
    spec.panel = args.panel;
    spec.num_loci = args.loci;
    spec.alleles_per_locus = args.alleles;
    spec.divergence = args.divergence;
    spec.seed = args.seed;
    spec.floor = args.floor;
    const FrequencyTable table = synthesize_table(spec);

    const fs::path csv_path(args.out_freqs);
    const fs::path meta_path(args.out_meta);
    if (csv_path.has_parent_path()) fs::create_directories(csv_path.parent_path());
    if (meta_path.has_parent_path()) fs::create_directories(meta_path.parent_path());
    {
      auto csv = open_output(csv_path);
      write_frequency_csv(csv, table);
    }
    TableMetadata meta = table.metadata();
    meta.freqs_path = fs::relative(fs::absolute(csv_path),
                                   fs::absolute(meta_path).parent_path()).string();
    {
      auto m = open_output(meta_path);
      write_metadata(m, meta);
    }
    fmt::print(out, "wrote {} ({} subpops x {} loci) and {}\n", csv_path.string(),
               table.num_subpops(), table.num_loci(), meta_path.string());
    return kExitOk;
  });
}

int cmd_validate(const ValidateArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const FrequencyTable table = load_table(args.source);
    fmt::print(out, "table OK: {} subpops, {} loci, floor {}\n", table.num_subpops(),
               table.num_loci(), table.floor());
    for (const auto& s : table.subpops()) {
      fmt::print(out, "  {:<16} p={:.6f}{}\n", s.name, s.proportion,
                 s.sample_size ? fmt::format("  n={}", *s.sample_size) : std::string());
    }
    const LrEvaluator evaluator(table, ThetaIBD::unrelated(), ThetaIBD::unrelated(),
                                default_pool_weights(table));
    for (const auto& path : args.profiles) {
      auto in = open_input(path);
      const Profile profile = read_profile_csv(in, path);
      try {
        evaluator.index_profile(profile);
      } catch (const KinshipError& e) {
        throw KinshipError(e.code(), path + ": " + e.what());
      }
      fmt::print(out, "profile OK: {}\n", path);
    }
    return kExitOk;
  });
}

}  // namespace kinship::cli
