#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kinship/frequency_table.hpp"

namespace kinship {

/// Synthetic stand-in for published allele-frequency tables.
struct SynthSpec {
  std::vector<std::string> subpop_names{"S1", "S2"};
  std::vector<double> proportions;   // empty: equal
  std::vector<double> sample_sizes;  // empty: none recorded
  std::vector<std::string> panel;    // empty: L1..L<num_loci>
  std::size_t num_loci = 15;
  std::size_t alleles_per_locus = 8;
  // Subpop distributions are Dirichlet(base / divergence) around a shared
  // Dirichlet(1, ..., 1) base per locus; 0 makes every subpop equal the base.
  double divergence = 0.05;
  std::uint64_t seed = 1;
  double floor = kDefaultFrequencyFloor;
};

FrequencyTable synthesize_table(const SynthSpec& spec);

/// Mean over loci of the total-variation distance between two subpops.
double mean_total_variation(const FrequencyTable& table, std::size_t s1, std::size_t s2);

}  // namespace kinship
