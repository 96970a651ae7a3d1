#include "kinship/profile.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <set>

#include "kinship/error.hpp"
#include "text_util.hpp"

namespace kinship {

Allele::Allele(std::string label) : label_(std::move(label)) {
  if (label_.empty()) throw KinshipError(ErrorCode::MalformedRow, "empty allele label");
}

std::strong_ordering operator<=>(const Allele& a, const Allele& b) {
  const auto x = detail::parse_double(a.label_);
  const auto y = detail::parse_double(b.label_);
  if (x && y) {
    if (*x < *y) return std::strong_ordering::less;
    if (*x > *y) return std::strong_ordering::greater;
  } else if (x) {
    return std::strong_ordering::less;  // numeric designations before named ones
  } else if (y) {
    return std::strong_ordering::greater;
  }
  return a.label_ <=> b.label_;
}

LocusGenotype::LocusGenotype(std::string locus, Allele a, Allele b)
    : locus_(std::move(locus)), first_(std::move(a)), second_(std::move(b)) {
  if (second_ < first_) std::swap(first_, second_);
}

Profile::Profile(std::vector<LocusGenotype> genotypes) : genotypes_(std::move(genotypes)) {
  std::set<std::string> seen;
  for (const auto& g : genotypes_) {
    if (!seen.insert(g.locus()).second) {
      throw KinshipError(ErrorCode::PanelMismatch, "locus " + g.locus() + " listed twice");
    }
  }
}

const LocusGenotype* Profile::find(const std::string& locus) const {
  const auto it = std::find_if(genotypes_.begin(), genotypes_.end(),
                               [&](const LocusGenotype& g) { return g.locus() == locus; });
  return it == genotypes_.end() ? nullptr : &*it;
}

Profile read_profile_csv(std::istream& in, const std::string& source_name) {
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  std::vector<LocusGenotype> genotypes;
  while (std::getline(in, line)) {
    ++line_no;
    const auto trimmed = detail::trim(line);
    if (trimmed.empty() || trimmed.front() == '#') continue;
    const auto fields = detail::split(trimmed, ',');
    const auto where = source_name + ":" + std::to_string(line_no);
    if (!header_seen) {
      if (fields != std::vector<std::string>{"locus", "allele1", "allele2"}) {
        throw KinshipError(ErrorCode::MalformedRow,
                           where + ": expected header 'locus,allele1,allele2'");
      }
      header_seen = true;
      continue;
    }
    if (fields.size() != 3 || fields[0].empty() || fields[1].empty() || fields[2].empty()) {
      throw KinshipError(ErrorCode::MalformedRow, where + ": expected 3 non-empty fields");
    }
    genotypes.emplace_back(fields[0], Allele(fields[1]), Allele(fields[2]));
  }
  if (!header_seen) throw KinshipError(ErrorCode::MalformedRow, source_name + ": empty profile");
  try {
    return Profile(std::move(genotypes));
  } catch (const KinshipError& e) {
    throw KinshipError(e.code(), source_name + ": " + e.what());
  }
}

void write_profile_csv(std::ostream& out, const Profile& profile) {
  out << "locus,allele1,allele2\n";
  for (const auto& g : profile.genotypes()) {
    out << g.locus() << ',' << g.first().label() << ',' << g.second().label() << '\n';
  }
}

}  // namespace kinship
