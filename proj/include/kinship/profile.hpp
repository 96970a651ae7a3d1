#pragma once

#include <compare>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace kinship {

/// STR allele designation ("13", "9.3", "OL"). Opaque token; equality is exact
/// string equality. Ordering is numeric when both labels parse as numbers, so
/// "9.3" sorts before "10".
class Allele {
 public:
  Allele() = default;
  explicit Allele(std::string label);

  const std::string& label() const noexcept { return label_; }

  friend bool operator==(const Allele&, const Allele&) = default;
  friend std::strong_ordering operator<=>(const Allele& a, const Allele& b);

 private:
  std::string label_;
};

/// Unordered genotype at one locus, stored with first() <= second().
class LocusGenotype {
 public:
  LocusGenotype(std::string locus, Allele a, Allele b);

  const std::string& locus() const noexcept { return locus_; }
  const Allele& first() const noexcept { return first_; }
  const Allele& second() const noexcept { return second_; }
  bool homozygous() const noexcept { return first_ == second_; }

  friend bool operator==(const LocusGenotype&, const LocusGenotype&) = default;

 private:
  std::string locus_;
  Allele first_;
  Allele second_;
};

/// One genotype per locus. Loci are unique; panel coverage is checked against
/// a frequency table when the profile is used.
class Profile {
 public:
  Profile() = default;
  explicit Profile(std::vector<LocusGenotype> genotypes);

  std::span<const LocusGenotype> genotypes() const noexcept { return genotypes_; }
  const LocusGenotype* find(const std::string& locus) const;
  std::size_t size() const noexcept { return genotypes_.size(); }

 private:
  std::vector<LocusGenotype> genotypes_;
};

struct ProfilePair {
  Profile first;
  Profile second;
};

/// Reads a profile CSV with header `locus,allele1,allele2`. `source_name` is
/// used in diagnostics.
Profile read_profile_csv(std::istream& in, const std::string& source_name = "<profile>");
void write_profile_csv(std::ostream& out, const Profile& profile);

}  // namespace kinship
