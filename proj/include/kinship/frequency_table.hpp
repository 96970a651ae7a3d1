#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kinship/profile.hpp"

namespace kinship {

inline constexpr double kDefaultFrequencyFloor = 1e-5;
inline constexpr double kProportionTolerance = 1e-4;

struct Subpopulation {
  std::string name;
  double proportion = 0.0;
  std::optional<double> sample_size;
};

/// Allele frequencies for a single locus. The allele list is the locus
/// alphabet, shared by every subpopulation of a table in the same order.
class AlleleDistribution {
 public:
  AlleleDistribution() = default;
  AlleleDistribution(std::vector<Allele> alleles, std::vector<double> freqs);

  std::span<const Allele> alleles() const noexcept { return alleles_; }
  std::span<const double> freqs() const noexcept { return freqs_; }
  std::size_t size() const noexcept { return alleles_.size(); }

  std::optional<std::size_t> index_of(const Allele& allele) const;
  /// Throws UnknownAllele when the allele is outside the alphabet.
  double frequency(const Allele& allele) const;

 private:
  std::vector<Allele> alleles_;
  std::vector<double> freqs_;
};

/// Raises every entry below `floor` to `floor` and rescales the remaining
/// mass so the total is 1. Iterates until no rescaled entry falls below the
/// floor. Requires floor * size < 1 and a positive total.
std::vector<double> apply_floor(std::span<const double> raw, double floor);

/// Contents of the companion metadata file.
struct TableMetadata {
  std::vector<std::string> subpop_names;
  std::vector<double> proportions;
  std::vector<double> sample_sizes;  // empty when absent
  std::vector<std::string> panel;    // empty: order of first appearance in the CSV
  double floor = kDefaultFrequencyFloor;
  std::string freqs_path;            // optional pointer to the frequency CSV
};

TableMetadata read_metadata(std::istream& in, const std::string& source_name = "<meta>");
void write_metadata(std::ostream& out, const TableMetadata& meta);

enum class PoolWeights { Census, SampleSizes, Equal };

PoolWeights parse_pool_weights(const std::string& name);
std::string_view to_string(PoolWeights weights);

/// Per-subpopulation allele frequency distributions over an ordered locus
/// panel, with mixing proportions. Immutable once built.
class FrequencyTable {
 public:
  /// `dists[s][l]` is subpop s at panel locus l. Every subpop must share the
  /// per-locus alphabet. Proportions must already sum to 1.
  FrequencyTable(std::vector<std::string> panel, std::vector<Subpopulation> subpops,
                 std::vector<std::vector<AlleleDistribution>> dists, double floor);

  std::span<const std::string> panel() const noexcept { return panel_; }
  std::span<const Subpopulation> subpops() const noexcept { return subpops_; }
  std::size_t num_subpops() const noexcept { return subpops_.size(); }
  std::size_t num_loci() const noexcept { return panel_.size(); }
  double floor() const noexcept { return floor_; }
  bool has_sample_sizes() const;

  std::optional<std::size_t> locus_index(const std::string& locus) const;
  const AlleleDistribution& distribution(std::size_t subpop, std::size_t locus) const {
    return dists_[subpop][locus];
  }
  std::vector<double> proportions() const;

  TableMetadata metadata() const;

 private:
  std::vector<std::string> panel_;
  std::vector<Subpopulation> subpops_;
  std::vector<std::vector<AlleleDistribution>> dists_;
  double floor_;
};

/// Parses a `subpop,locus,allele,freq` CSV against metadata. Frequencies are
/// floored and renormalised per (subpop, locus); proportions are renormalised
/// when they sum to 1 within kProportionTolerance.
FrequencyTable load_frequency_table(std::istream& csv, const TableMetadata& meta,
                                    const std::string& source_name = "<freqs>");

/// Writes the CSV body of a table with round-trip precision.
void write_frequency_csv(std::ostream& out, const FrequencyTable& table);

/// Single pseudo-subpopulation whose frequencies are the weighted mean of the
/// table's subpopulations. Weights need not be positive but must sum to > 0;
/// they are normalised internally.
FrequencyTable pool_with_weights(const FrequencyTable& table, std::span<const double> weights,
                                 const std::string& name);

/// Proportion-weighted mean (f_local).
FrequencyTable local_average(const FrequencyTable& table);

FrequencyTable pooled_frequencies(const FrequencyTable& table, PoolWeights weights);

/// Default pooling for the combined statistic: sample sizes when the table has
/// them, otherwise equal weights.
PoolWeights default_pool_weights(const FrequencyTable& table);

}  // namespace kinship
