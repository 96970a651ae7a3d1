#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "kinship/frequency_table.hpp"
#include "kinship/mcengine.hpp"
#include "kinship/pairprob.hpp"
#include "kinship/powerest.hpp"

namespace kinship::cli {

// Stable process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitRuntime = 3;

struct TableSource {
  std::string freqs_path;  // empty: taken from the metadata `freqs` key
  std::string meta_path;
};

struct HypothesisSpec {
  std::string test = "full-sib";  // parent-child|full-sib|half-sib-paper|half-sib-standard|custom
  std::optional<std::string> theta0;
  std::optional<std::string> theta1;
};

struct ResolvedHypothesis {
  std::string name;
  ThetaIBD theta0 = ThetaIBD::unrelated();
  ThetaIBD theta1 = ThetaIBD::full_sib();
  double default_alpha = kFullSibAlpha;
};

struct RunSpec {
  TableSource source;
  HypothesisSpec hypothesis;
  std::vector<double> alphas;  // empty: the test's default
  std::uint64_t replicates = kDeskReplicates;
  bool paper_scale = false;
  std::uint64_t seed = 1;
  std::string stats = "all";
  std::optional<std::string> cb_weights;
  unsigned workers = 0;
  std::string out_dir = "out";
  bool null_same_subpop = false;
  bool dump_samples = false;
  // power-curve / subpop-bias grid; empty uses default_alpha_grid()
  std::vector<double> alpha_grid;
};

struct LrArgs {
  TableSource source;
  HypothesisSpec hypothesis;
  std::string profile1;
  std::string profile2;
  std::optional<std::string> cb_weights;
};

struct SynthArgs {
  std::vector<std::string> subpops{"S1", "S2", "S3", "S4"};
  std::vector<double> proportions;
  std::vector<double> sample_sizes;
  std::vector<std::string> panel;
  std::size_t loci = 15;
  std::size_t alleles = 8;
  double divergence = 0.05;
  std::uint64_t seed = 1;
  double floor = kDefaultFrequencyFloor;
  std::string out_freqs = "synth_freqs.csv";
  std::string out_meta = "synth.meta";
};

struct ValidateArgs {
  TableSource source;
  std::vector<std::string> profiles;
};

ResolvedHypothesis resolve_hypothesis(const HypothesisSpec& spec);
FrequencyTable load_table(const TableSource& source);

int cmd_lr(const LrArgs& args, std::ostream& out, std::ostream& err);
int cmd_power(const RunSpec& spec, std::ostream& out, std::ostream& err);
int cmd_power_curve(const RunSpec& spec, std::ostream& out, std::ostream& err);
int cmd_subpop_bias(const RunSpec& spec, std::ostream& out, std::ostream& err);
int cmd_synth_freqs(const SynthArgs& args, std::ostream& out, std::ostream& err);
int cmd_validate(const ValidateArgs& args, std::ostream& out, std::ostream& err);

}  // namespace kinship::cli
