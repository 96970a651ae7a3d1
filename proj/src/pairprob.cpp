#include "kinship/pairprob.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <utility>

#include "kinship/error.hpp"
#include "text_util.hpp"

namespace kinship {

namespace {

constexpr double kThetaSumTolerance = 1e-12;

// Accepts "0.25" or "1/4".
std::optional<double> parse_component(std::string_view text) {
  text = detail::trim(text);
  if (const auto slash = text.find('/'); slash != std::string_view::npos) {
    const auto num = detail::parse_double(text.substr(0, slash));
    const auto den = detail::parse_double(text.substr(slash + 1));
    if (!num || !den || *den == 0.0) return std::nullopt;
    return *num / *den;
  }
  return detail::parse_double(text);
}

// P(g2 | one allele of g2 is `shared`, the other drawn from freqs)
double transmission(std::uint16_t shared, IndexedGenotype g2, std::span<const double> freqs) {
  if (g2.homozygous()) return shared == g2.a ? freqs[g2.a] : 0.0;
  double p = 0.0;
  if (shared == g2.a) p += freqs[g2.b];
  if (shared == g2.b) p += freqs[g2.a];
  return p;
}

}  // namespace

ThetaIBD::ThetaIBD(double z0, double z1, double z2) : z_{z0, z1, z2} {
  for (double z : z_) {
    if (!std::isfinite(z) || z < 0.0) {
      throw KinshipError(ErrorCode::InvalidTheta, "negative IBD coefficient in " + to_string(*this));
    }
  }
  if (std::abs(z0 + z1 + z2 - 1.0) > kThetaSumTolerance) {
    throw KinshipError(ErrorCode::InvalidTheta, "IBD coefficients must sum to 1: " +
                                                    to_string(*this));
  }
}

ThetaIBD ThetaIBD::parse(std::string_view text) {
  const auto parts = detail::split(text, ',');
  if (parts.size() != 3) {
    throw KinshipError(ErrorCode::InvalidTheta, "expected z0,z1,z2 but got '" +
                                                    std::string(text) + "'");
  }
  std::array<double, 3> z{};
  for (std::size_t i = 0; i < 3; ++i) {
    const auto v = parse_component(parts[i]);
    if (!v) throw KinshipError(ErrorCode::InvalidTheta, "bad component '" + parts[i] + "'");
    z[i] = *v;
  }
  return {z[0], z[1], z[2]};
}

std::string to_string(const ThetaIBD& theta) {
  std::ostringstream os;
  os << '(' << theta.z0() << ',' << theta.z1() << ',' << theta.z2() << ')';
  return os.str();
}

std::string_view to_string(CombinationClass cls) {
  switch (cls) {
    case CombinationClass::AA_AA: return "AA,AA";
    case CombinationClass::AA_AB: return "AA,AB";
    case CombinationClass::AA_BB: return "AA,BB";
    case CombinationClass::AB_AB: return "AB,AB";
    case CombinationClass::AA_BC: return "AA,BC";
    case CombinationClass::AB_AC: return "AB,AC";
    case CombinationClass::AB_CD: return "AB,CD";
  }
  return "?";
}

Classification classify(const LocusGenotype& g1, const LocusGenotype& g2) {
  const Allele& a1 = g1.first();
  const Allele& b1 = g1.second();
  const Allele& a2 = g2.first();
  const Allele& b2 = g2.second();
  if (g1.homozygous() && g2.homozygous()) {
    if (a1 == a2) return {CombinationClass::AA_AA, {a1}};
    return {CombinationClass::AA_BB, {a1, a2}};
  }
  if (g1.homozygous() || g2.homozygous()) {
    const LocusGenotype& hom = g1.homozygous() ? g1 : g2;
    const LocusGenotype& het = g1.homozygous() ? g2 : g1;
    const Allele& a = hom.first();
    if (het.first() == a) return {CombinationClass::AA_AB, {a, het.second()}};
    if (het.second() == a) return {CombinationClass::AA_AB, {a, het.first()}};
    return {CombinationClass::AA_BC, {a, het.first(), het.second()}};
  }
  if (a1 == a2 && b1 == b2) return {CombinationClass::AB_AB, {a1, b1}};
  if (a1 == a2) return {CombinationClass::AB_AC, {a1, b1, b2}};
  if (a1 == b2) return {CombinationClass::AB_AC, {a1, b1, a2}};
  if (b1 == a2) return {CombinationClass::AB_AC, {b1, a1, b2}};
  if (b1 == b2) return {CombinationClass::AB_AC, {b1, a1, a2}};
  return {CombinationClass::AB_CD, {a1, b1, a2, b2}};
}

CombinationClass classify(IndexedGenotype g1, IndexedGenotype g2) {
  if (g1.homozygous() && g2.homozygous()) {
    return g1.a == g2.a ? CombinationClass::AA_AA : CombinationClass::AA_BB;
  }
  if (g1.homozygous() || g2.homozygous()) {
    const IndexedGenotype hom = g1.homozygous() ? g1 : g2;
    const IndexedGenotype het = g1.homozygous() ? g2 : g1;
    return (het.a == hom.a || het.b == hom.a) ? CombinationClass::AA_AB
                                              : CombinationClass::AA_BC;
  }
  if (g1 == g2) return CombinationClass::AB_AB;
  const int shared = (g1.a == g2.a) + (g1.a == g2.b) + (g1.b == g2.a) + (g1.b == g2.b);
  return shared ? CombinationClass::AB_AC : CombinationClass::AB_CD;
}

double hwe_probability(IndexedGenotype g, std::span<const double> freqs) noexcept {
  return g.homozygous() ? freqs[g.a] * freqs[g.a] : 2.0 * freqs[g.a] * freqs[g.b];
}

IbdComponents ibd_components(IndexedGenotype g1, IndexedGenotype g2,
                             std::span<const double> freqs) noexcept {
  // canonical order makes the result bit-identical under swapping
  if (std::pair(g2.a, g2.b) < std::pair(g1.a, g1.b)) std::swap(g1, g2);
  const bool same = g1 == g2;
  const double orderings = same ? 1.0 : 2.0;
  const double h1 = hwe_probability(g1, freqs);
  const double transmit =
      0.5 * (transmission(g1.a, g2, freqs) + transmission(g1.b, g2, freqs));
  return {orderings * h1 * hwe_probability(g2, freqs), orderings * h1 * transmit,
          same ? h1 : 0.0};
}

IndexedGenotype to_indexed(const LocusGenotype& g, const AlleleDistribution& f) {
  const auto a = f.index_of(g.first());
  const auto b = f.index_of(g.second());
  if (!a || !b) {
    const auto& missing = a ? g.second() : g.first();
    throw KinshipError(ErrorCode::UnknownAllele,
                       "allele " + missing.label() + " at locus " + g.locus());
  }
  return IndexedGenotype::make(*a, *b);
}

LocusGenotype from_indexed(IndexedGenotype g, const std::string& locus,
                           const AlleleDistribution& f) {
  return {locus, f.alleles()[g.a], f.alleles()[g.b]};
}

double pair_probability(const LocusGenotype& g1, const LocusGenotype& g2, const ThetaIBD& theta,
                        const AlleleDistribution& f) {
  return ibd_components(to_indexed(g1, f), to_indexed(g2, f), f.freqs()).combine(theta);
}

double ordered_pair_probability(const LocusGenotype& g1, const LocusGenotype& g2,
                                const ThetaIBD& theta, const AlleleDistribution& f) {
  const double p = pair_probability(g1, g2, theta, f);
  return g1.first() == g2.first() && g1.second() == g2.second() ? p : 0.5 * p;
}

double log_pair_probability(const LocusGenotype& g1, const LocusGenotype& g2,
                            const ThetaIBD& theta, const AlleleDistribution& f) {
  const double p = pair_probability(g1, g2, theta, f);
  return p > 0.0 ? std::log(p) : -std::numeric_limits<double>::infinity();
}

AlleleSampler::AlleleSampler(std::span<const double> freqs) {
  if (freqs.empty()) throw KinshipError(ErrorCode::InvalidArgument, "empty allele distribution");
  cumulative_.reserve(freqs.size());
  double total = 0.0;
  for (double f : freqs) {
    total += f;
    cumulative_.push_back(total);
  }
  for (double& c : cumulative_) c /= total;
  cumulative_.back() = 1.0;
}

std::uint16_t AlleleSampler::draw(RandomStream& rng) const {
  const double u = rng.uniform();
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  const auto idx = static_cast<std::size_t>(it - cumulative_.begin());
  return static_cast<std::uint16_t>(std::min(idx, cumulative_.size() - 1));
}

IndexedGenotype sample_genotype(const AlleleSampler& sampler, RandomStream& rng) {
  const auto x = sampler.draw(rng);
  const auto y = sampler.draw(rng);
  return IndexedGenotype::make(x, y);
}

IndexedGenotype sample_related(IndexedGenotype g1, const ThetaIBD& theta,
                               const AlleleSampler& sampler, RandomStream& rng) {
  const double u = rng.uniform();
  if (u < theta.z0()) return sample_genotype(sampler, rng);
  if (u < theta.z0() + theta.z1() || theta.z2() == 0.0) {
    const std::uint16_t kept = (rng() >> 63) ? g1.b : g1.a;
    return IndexedGenotype::make(kept, sampler.draw(rng));
  }
  return g1;
}

LocusGenotype sample_genotype(const std::string& locus, const AlleleDistribution& f,
                              RandomStream& rng) {
  return from_indexed(sample_genotype(AlleleSampler(f.freqs()), rng), locus, f);
}

LocusGenotype sample_related(const LocusGenotype& g1, const ThetaIBD& theta,
                             const AlleleDistribution& f, RandomStream& rng) {
  return from_indexed(sample_related(to_indexed(g1, f), theta, AlleleSampler(f.freqs()), rng),
                      g1.locus(), f);
}

}  // namespace kinship
