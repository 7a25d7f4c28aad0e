#pragma once

// Mamdani combination of the left and right detector errors of a separator.
//
// Five linguistic terms partition the error axis. The rule base is fixed:
//   PS(L) or PS(R) -> PS      P(L) or P(R) -> P      Z(R) and Z(L) -> Z
//   NS(L) or NS(R) -> NS      N(L) or N(R) -> N
// OR is max, AND is min, implication is min, aggregation is max, and the
// crisp ErrorTot is the sampled centroid of the aggregate.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <string_view>

namespace fuzzwrap {

enum class Term : std::size_t {
  Negative = 0,
  NegativeSmall = 1,
  Zero = 2,
  PositiveSmall = 3,
  Positive = 4,
};

inline constexpr std::size_t kNumTerms = 5;

inline std::string_view term_name(Term t) {
  switch (t) {
    case Term::Negative: return "negative";
    case Term::NegativeSmall: return "negativeSmall";
    case Term::Zero: return "zero";
    case Term::PositiveSmall: return "positiveSmall";
    case Term::Positive: return "positive";
  }
  return "?";
}

struct Triangle {
  double left = 0;
  double peak = 0;
  double right = 0;

  double operator()(double x) const {
    if (x <= left || x >= right) return x == peak ? 1.0 : 0.0;
    if (x == peak) return 1.0;
    if (x < peak) return (x - left) / (peak - left);
    return (right - x) / (right - peak);
  }

  friend bool operator==(const Triangle&, const Triangle&) = default;
};

enum class CombineMode { Fuzzy, Sum };

inline std::string_view mode_name(CombineMode m) {
  return m == CombineMode::Fuzzy ? "fuzzy" : "sum";
}

struct FuzzyPartition {
  std::array<Triangle, kNumTerms> terms{{{-1.5, -1.0, -0.5},
                                         {-1.0, -0.5, 0.0},
                                         {-0.5, 0.0, 0.5},
                                         {0.0, 0.5, 1.0},
                                         {0.5, 1.0, 1.5}}};
  double domain_min = -1.5;
  double domain_max = 1.5;
  std::size_t samples = 1001;

  const Triangle& operator[](Term t) const {
    return terms[static_cast<std::size_t>(t)];
  }

  friend bool operator==(const FuzzyPartition&, const FuzzyPartition&) = default;
};

using Memberships = std::array<double, kNumTerms>;

// Membership of `e` (clamped to the domain) in each term. The outer terms
// hold at 1 beyond their peaks so that every input keeps full support.
inline Memberships fuzzify(double e, const FuzzyPartition& p = {}) {
  e = std::clamp(e, p.domain_min, p.domain_max);
  Memberships m{};
  for (std::size_t i = 0; i < kNumTerms; ++i) m[i] = p.terms[i](e);
  if (e <= p.terms.front().peak) m.front() = 1.0;
  if (e >= p.terms.back().peak) m.back() = 1.0;
  return m;
}

// Firing strength of each rule's consequent term.
inline Memberships fire_rules(double error_left, double error_right,
                              const FuzzyPartition& p = {}) {
  const Memberships l = fuzzify(error_left, p);
  const Memberships r = fuzzify(error_right, p);
  auto idx = [](Term t) { return static_cast<std::size_t>(t); };
  Memberships w{};
  for (Term t : {Term::Negative, Term::NegativeSmall, Term::PositiveSmall,
                 Term::Positive})
    w[idx(t)] = std::max(l[idx(t)], r[idx(t)]);
  w[idx(Term::Zero)] = std::min(r[idx(Term::Zero)], l[idx(Term::Zero)]);
  return w;
}

inline double defuzzify_centroid(const Memberships& strength,
                                 const FuzzyPartition& p = {}) {
  const std::size_t n = std::max<std::size_t>(p.samples, 3);
  const double center = 0.5 * (p.domain_min + p.domain_max);
  const double half = static_cast<double>(n - 1) / 2.0;
  const double step = (p.domain_max - p.domain_min) / static_cast<double>(n - 1);

  auto aggregate = [&](double x) {
    double mu = 0.0;
    for (std::size_t i = 0; i < kNumTerms; ++i)
      mu = std::max(mu, std::min(strength[i], p.terms[i](x)));
    return mu;
  };

  // Samples are placed symmetrically about the domain center and summed in
  // mirrored pairs, so mirrored aggregates give exactly negated centroids.
  double num = 0.0;
  double den = 0.0;
  for (std::size_t k = 0; k < n / 2; ++k) {
    const double off = (half - static_cast<double>(k)) * step;
    const double lo = center - off;
    const double hi = center + off;
    const double mu_lo = aggregate(lo);
    const double mu_hi = aggregate(hi);
    num += (-off * mu_lo + off * mu_hi);
    den += mu_lo + mu_hi;
  }
  if (n % 2 == 1) den += aggregate(center);
  if (den <= 0.0) return center;
  return center + num / den;
}

// Crisp separator error from the two detector errors.
inline double infer_error_tot(double error_left, double error_right,
                              const FuzzyPartition& p = {},
                              CombineMode mode = CombineMode::Fuzzy) {
  if (mode == CombineMode::Sum) return error_left + error_right;
  return defuzzify_centroid(fire_rules(error_left, error_right, p), p);
}

}  // namespace fuzzwrap
