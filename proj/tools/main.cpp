#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"

namespace {

using namespace kinship::cli;

void add_table(CLI::App* app, TableSource& source) {
  app->add_option("--freqs", source.freqs_path, "allele frequency CSV (subpop,locus,allele,freq)");
  app->add_option("--meta", source.meta_path, "table metadata file")->required();
}

void add_hypothesis(CLI::App* app, HypothesisSpec& hyp) {
  app->add_option("--test", hyp.test, "parent-child|full-sib|half-sib-paper|half-sib-standard|custom")
      ->check(CLI::IsMember(
          {"parent-child", "full-sib", "half-sib-paper", "half-sib-standard", "custom"}));
  app->add_option("--theta0", hyp.theta0, "null IBD vector z0,z1,z2");
  app->add_option("--theta1", hyp.theta1, "alternative IBD vector z0,z1,z2");
}

void add_run(CLI::App* app, RunSpec& spec, bool with_grid) {
  add_table(app, spec.source);
  add_hypothesis(app, spec.hypothesis);
  app->add_option("--alpha", spec.alphas, "false-positive rate(s)")->delimiter(',');
  app->add_option("--B", spec.replicates, "Monte Carlo replicates")->check(CLI::PositiveNumber);
  app->add_flag("--paper-scale", spec.paper_scale, "use 1,000,000 replicates");
  app->add_option("--seed", spec.seed, "master seed");
  app->add_option("--stats", spec.stats, "comma list of statistics or 'all'");
  app->add_option("--cb-weights", spec.cb_weights, "pooling weights for CB")
      ->check(CLI::IsMember({"census", "samples", "equal"}));
  app->add_option("--workers", spec.workers, "worker threads (0: hardware)");
  app->add_option("--out", spec.out_dir, "output directory");
  app->add_flag("--null-same-subpop", spec.null_same_subpop,
                "draw both null profiles from one subpopulation");
  app->add_flag("--dump-samples", spec.dump_samples, "write raw null/alt samples");
  if (with_grid) {
    app->add_option("--alpha-grid", spec.alpha_grid, "alpha grid for curves")->delimiter(',');
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kinship likelihood ratios and Monte Carlo power under population substructure"};
  app.require_subcommand(1);

  LrArgs lr;
  auto* lr_cmd = app.add_subcommand("lr", "likelihood ratios for one profile pair");
  add_table(lr_cmd, lr.source);
  add_hypothesis(lr_cmd, lr.hypothesis);
  lr_cmd->add_option("profile1", lr.profile1, "first profile CSV")->required();
  lr_cmd->add_option("profile2", lr.profile2, "second profile CSV")->required();
  lr_cmd->add_option("--cb-weights", lr.cb_weights, "pooling weights for CB")
      ->check(CLI::IsMember({"census", "samples", "equal"}));

  RunSpec power;
  auto* power_cmd = app.add_subcommand("power", "thresholds and power at fixed alpha");
  add_run(power_cmd, power, false);

  RunSpec curve;
  auto* curve_cmd = app.add_subcommand("power-curve", "power over an alpha grid");
  add_run(curve_cmd, curve, true);

  RunSpec bias;
  auto* bias_cmd = app.add_subcommand("subpop-bias", "per-subpopulation power and differences");
  add_run(bias_cmd, bias, true);

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth-freqs", "write a synthetic frequency table");
  synth_cmd->add_option("--subpops", synth.subpops, "subpopulation names")->delimiter(',');
  synth_cmd->add_option("--proportions", synth.proportions, "census proportions")->delimiter(',');
  synth_cmd->add_option("--sample-sizes", synth.sample_sizes, "survey sample sizes")
      ->delimiter(',');
  synth_cmd->add_option("--panel", synth.panel, "locus names")->delimiter(',');
  synth_cmd->add_option("--loci", synth.loci, "number of loci when no panel is given");
  synth_cmd->add_option("--alleles", synth.alleles, "alleles per locus");
  synth_cmd->add_option("--divergence", synth.divergence, "between-subpop divergence");
  synth_cmd->add_option("--seed", synth.seed, "RNG seed");
  synth_cmd->add_option("--floor", synth.floor, "frequency floor");
  synth_cmd->add_option("--out-freqs", synth.out_freqs, "frequency CSV path");
  synth_cmd->add_option("--out-meta", synth.out_meta, "metadata path");

  ValidateArgs validate;
  auto* validate_cmd = app.add_subcommand("validate", "check a table and optional profiles");
  add_table(validate_cmd, validate.source);
  validate_cmd->add_option("profiles", validate.profiles, "profile CSVs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  if (*lr_cmd) return cmd_lr(lr, std::cout, std::cerr);
  if (*power_cmd) return cmd_power(power, std::cout, std::cerr);
  if (*curve_cmd) return cmd_power_curve(curve, std::cout, std::cerr);
  if (*bias_cmd) return cmd_subpop_bias(bias, std::cout, std::cerr);
  if (*synth_cmd) return cmd_synth_freqs(synth, std::cout, std::cerr);
  if (*validate_cmd) return cmd_validate(validate, std::cout, std::cerr);
  return kExitValidation;
}
