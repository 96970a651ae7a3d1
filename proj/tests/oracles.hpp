#pragma once

// Independent reference formulas used as test oracles. Nothing here calls
// into the library's probability code.

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <vector>

namespace kinship::oracle {

struct Cells {
  double unrelated;
  double parent_child;
  double full_sib;
  double both_ibd;  // P(g1) when the genotypes are equal
};

// Classic unordered genotype-pair table. Genotypes are (x1,y1), (x2,y2) as
// allele indices into `f`.
inline Cells kinship_table(int x1, int y1, int x2, int y2, const std::vector<double>& f) {
  if (x1 > y1) std::swap(x1, y1);
  if (x2 > y2) std::swap(x2, y2);
  const bool hom1 = x1 == y1;
  const bool hom2 = x2 == y2;
  const bool same = x1 == x2 && y1 == y2;
  const double hwe1 = hom1 ? f[x1] * f[x1] : 2 * f[x1] * f[y1];
  const double p2 = same ? hwe1 : 0.0;

  if (same && hom1) {  // AA,AA
    const double p = f[x1];
    return {std::pow(p, 4), std::pow(p, 3), p * p * (1 + p) * (1 + p) / 4, p2};
  }
  if (same) {  // AB,AB
    const double p = f[x1], q = f[y1];
    return {4 * p * p * q * q, p * q * (p + q), p * q * (1 + p + q + 2 * p * q) / 2, p2};
  }
  if (hom1 && hom2) {  // AA,BB
    const double p = f[x1], q = f[x2];
    return {2 * p * p * q * q, 0.0, p * p * q * q / 2, 0.0};
  }
  if (hom1 != hom2) {
    const int a = hom1 ? x1 : x2;
    const int h1 = hom1 ? x2 : x1;
    const int h2 = hom1 ? y2 : y1;
    const double p = f[a];
    if (h1 == a || h2 == a) {  // AA,AB
      const double q = f[h1 == a ? h2 : h1];
      return {4 * p * p * p * q, 2 * p * p * q, p * p * q * (1 + p), 0.0};
    }
    const double q = f[h1], r = f[h2];  // AA,BC
    return {4 * p * p * q * r, 0.0, p * p * q * r, 0.0};
  }
  // both heterozygous and different
  std::optional<int> shared;
  for (int u : {x1, y1}) {
    if (u == x2 || u == y2) shared = u;
  }
  if (shared) {  // AB,AC
    const int a = *shared;
    const double p = f[a];
    const double q = f[x1 == a ? y1 : x1];
    const double r = f[x2 == a ? y2 : x2];
    return {8 * p * p * q * r, 2 * p * q * r, p * q * r * (1 + 2 * p), 0.0};
  }
  const double p = f[x1], q = f[y1], r = f[x2], s = f[y2];  // AB,CD
  return {8 * p * q * r * s, 0.0, 2 * p * q * r * s, 0.0};
}

// Linear-space likelihood of a multi-locus pair: product of table cells
// mixed by (z0, z1, z2).
inline double mixed(const Cells& c, double z0, double z1, double z2) {
  return z0 * c.unrelated + z1 * c.parent_child + z2 * c.both_ibd;
}

}  // namespace kinship::oracle
