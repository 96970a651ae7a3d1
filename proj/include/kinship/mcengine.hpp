#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

#include "kinship/frequency_table.hpp"
#include "kinship/lrstats.hpp"
#include "kinship/pairprob.hpp"

namespace kinship {

inline constexpr std::uint64_t kPaperReplicates = 1'000'000;
inline constexpr std::uint64_t kDeskReplicates = 100'000;

struct SimConfig {
  std::shared_ptr<const FrequencyTable> table;
  ThetaIBD theta0 = ThetaIBD::unrelated();
  ThetaIBD theta1 = ThetaIBD::full_sib();
  std::uint64_t replicates = kDeskReplicates;
  std::uint64_t seed = 0;
  std::vector<Statistic> statistics{kAllStatistics.begin(), kAllStatistics.end()};
  unsigned workers = 0;  // 0: hardware concurrency
  PoolWeights cb_weights = PoolWeights::Equal;
  // Draw both null individuals from one subpopulation instead of two
  // independent draws.
  bool null_same_subpop = false;

  /// Throws InvalidConfig.
  void validate() const;
};

/// Per-statistic log-LR samples, one entry per replicate, plus the
/// subpopulation tag of the first individual of each pair.
struct SampleMatrix {
  std::vector<Statistic> statistics;
  std::vector<std::vector<double>> values;  // parallel to `statistics`
  std::vector<std::uint16_t> tags;

  std::size_t replicates() const noexcept { return tags.size(); }
  /// Throws InvalidArgument when the statistic was not simulated.
  std::span<const double> column(Statistic stat) const;

  friend bool operator==(const SampleMatrix&, const SampleMatrix&) = default;
};

/// Draws the profile pair of one replicate. Replicate i of a given kind
/// depends only on (seed, kind, i).
class PairSampler {
 public:
  explicit PairSampler(const SimConfig& cfg);

  /// Unrelated pair: subpops drawn independently from the proportions (or
  /// shared when null_same_subpop). Returns the first individual's subpop.
  std::uint16_t draw_null(std::uint64_t replicate, std::span<IndexedGenotype> first,
                          std::span<IndexedGenotype> second) const;
  /// Related pair under theta1; both individuals share one subpop.
  std::uint16_t draw_alt(std::uint64_t replicate, std::span<IndexedGenotype> first,
                         std::span<IndexedGenotype> second) const;

  std::size_t num_loci() const noexcept { return num_loci_; }

 private:
  std::uint64_t seed_;
  ThetaIBD theta1_;
  bool null_same_subpop_;
  std::size_t num_loci_;
  AlleleSampler subpop_sampler_;
  std::vector<std::vector<AlleleSampler>> allele_samplers_;  // [subpop][locus]
};

SampleMatrix simulate_null(const SimConfig& cfg);
SampleMatrix simulate_alt(const SimConfig& cfg);

/// CSV dump: `replicate,subpop_tag,<stat>...` with log-scale values.
void write_sample_csv(std::ostream& out, const SampleMatrix& samples);
SampleMatrix read_sample_csv(std::istream& in);

}  // namespace kinship
