#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kinship/frequency_table.hpp"
#include "kinship/profile.hpp"
#include "kinship/random.hpp"

namespace kinship {

/// IBD-sharing probabilities (z0, z1, z2) describing a relationship.
class ThetaIBD {
 public:
  /// Throws InvalidTheta unless all components are >= 0 and sum to 1
  /// within 1e-12.
  ThetaIBD(double z0, double z1, double z2);

  double z0() const noexcept { return z_[0]; }
  double z1() const noexcept { return z_[1]; }
  double z2() const noexcept { return z_[2]; }
  double operator[](std::size_t i) const { return z_[i]; }

  static ThetaIBD unrelated() { return {1.0, 0.0, 0.0}; }
  static ThetaIBD parent_child() { return {0.0, 1.0, 0.0}; }
  static ThetaIBD full_sib() { return {0.25, 0.5, 0.25}; }
  // Half-sibling vector used in some published power comparisons; the textbook
  // half-sibling coefficients are half_sib_standard().
  static ThetaIBD half_sib_paper() { return {0.0, 0.5, 0.5}; }
  static ThetaIBD half_sib_standard() { return {0.5, 0.5, 0.0}; }

  /// Parses "z0,z1,z2".
  static ThetaIBD parse(std::string_view text);

  friend bool operator==(const ThetaIBD&, const ThetaIBD&) = default;

 private:
  std::array<double, 3> z_;
};

std::string to_string(const ThetaIBD& theta);

/// The seven unordered genotype-pair patterns. Letters name distinct alleles;
/// the shared allele, when there is one, is always A.
enum class CombinationClass : std::uint8_t { AA_AA, AA_AB, AA_BB, AB_AB, AA_BC, AB_AC, AB_CD };
inline constexpr std::size_t kNumCombinationClasses = 7;

std::string_view to_string(CombinationClass cls);

struct Classification {
  CombinationClass cls;
  std::vector<Allele> roles;  // alleles bound to A, B, C, D in that order
};

Classification classify(const LocusGenotype& g1, const LocusGenotype& g2);

/// Genotype as indices into a locus alphabet, with a <= b.
struct IndexedGenotype {
  std::uint16_t a = 0;
  std::uint16_t b = 0;

  static IndexedGenotype make(std::size_t x, std::size_t y) {
    return x <= y ? IndexedGenotype{static_cast<std::uint16_t>(x), static_cast<std::uint16_t>(y)}
                  : IndexedGenotype{static_cast<std::uint16_t>(y), static_cast<std::uint16_t>(x)};
  }
  bool homozygous() const noexcept { return a == b; }
  friend bool operator==(const IndexedGenotype&, const IndexedGenotype&) = default;
};

CombinationClass classify(IndexedGenotype g1, IndexedGenotype g2);

/// Probability of the unordered genotype pair {g1, g2} given 0, 1 or 2
/// alleles IBD. For g1 != g2 this counts both orderings, matching the
/// classic seven-row kinship table; pair_probability = z . components.
struct IbdComponents {
  double p0 = 0.0;  // HWE product (unrelated)
  double p1 = 0.0;  // one allele IBD (parent-child)
  double p2 = 0.0;  // both alleles IBD: P(g1) when g1 == g2

  double combine(const ThetaIBD& theta) const noexcept {
    return theta.z0() * p0 + theta.z1() * p1 + theta.z2() * p2;
  }
};

double hwe_probability(IndexedGenotype g, std::span<const double> freqs) noexcept;
IbdComponents ibd_components(IndexedGenotype g1, IndexedGenotype g2,
                             std::span<const double> freqs) noexcept;

/// Unordered-pair probability (sums to 1 over unordered pairs).
double pair_probability(const LocusGenotype& g1, const LocusGenotype& g2, const ThetaIBD& theta,
                        const AlleleDistribution& f);
/// Joint probability of the ordered pair (X1 = g1, X2 = g2); sums to 1 over
/// ordered pairs and marginalises to the HWE probability of g1.
double ordered_pair_probability(const LocusGenotype& g1, const LocusGenotype& g2,
                                const ThetaIBD& theta, const AlleleDistribution& f);
/// log(pair_probability); -infinity only for a zero-probability pair.
double log_pair_probability(const LocusGenotype& g1, const LocusGenotype& g2,
                            const ThetaIBD& theta, const AlleleDistribution& f);

/// Inverse-CDF sampler over a locus alphabet.
class AlleleSampler {
 public:
  explicit AlleleSampler(std::span<const double> freqs);

  std::uint16_t draw(RandomStream& rng) const;
  std::size_t size() const noexcept { return cumulative_.size(); }

 private:
  std::vector<double> cumulative_;
};

/// Two independent draws (HWE).
IndexedGenotype sample_genotype(const AlleleSampler& sampler, RandomStream& rng);
/// Relative of g1 under theta: IBD count J ~ (z0, z1, z2); J = 0 draws a fresh
/// genotype, J = 1 copies one of g1's two allele slots uniformly and draws
/// the other allele, J = 2 copies g1.
IndexedGenotype sample_related(IndexedGenotype g1, const ThetaIBD& theta,
                               const AlleleSampler& sampler, RandomStream& rng);

LocusGenotype sample_genotype(const std::string& locus, const AlleleDistribution& f,
                              RandomStream& rng);
LocusGenotype sample_related(const LocusGenotype& g1, const ThetaIBD& theta,
                             const AlleleDistribution& f, RandomStream& rng);

/// Maps a genotype onto the alphabet of `f`; throws UnknownAllele.
IndexedGenotype to_indexed(const LocusGenotype& g, const AlleleDistribution& f);
LocusGenotype from_indexed(IndexedGenotype g, const std::string& locus,
                           const AlleleDistribution& f);

}  // namespace kinship
