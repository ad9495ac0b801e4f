#pragma once

#include "radsum/spaces.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace radsum {

enum class DistKind { Exact, Empirical };

std::string to_string(DistKind k);

struct Atom {
  double value;
  double probability;
};

// Law of a nonnegative random variable with finitely many atoms. Weights are
// stored as integer counts over a common denominator, so tail probabilities
// of exact distributions are exact dyadic rationals.
class DistSummary {
public:
  // Builds atoms from raw observations, each of weight 1/total. Values closer
  // than `merge_tolerance * max(values)` to the smallest value of their group
  // are merged into it.
  static DistSummary from_observations(DistKind kind, std::vector<double> observations, double merge_tolerance);

  DistKind kind() const noexcept { return kind_; }
  std::size_t size() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }
  std::span<const std::uint64_t> counts() const noexcept { return counts_; }
  std::uint64_t total() const noexcept { return total_; }
  double probability(std::size_t i) const { return static_cast<double>(counts_[i]) / static_cast<double>(total_); }
  // P(S <= values[i]).
  double cumulative(std::size_t i) const { return static_cast<double>(cum_[i]) / static_cast<double>(total_); }
  std::vector<Atom> atoms() const;

  double min() const { return values_.front(); }
  double max() const { return values_.back(); }

  // Number of Rademacher terms; sample count and seed for empirical laws.
  std::size_t n_terms = 0;
  std::uint64_t sample_count = 0;
  std::uint64_t seed = 0;
  // Largest relative gap between running and freshly recomputed sums seen
  // during enumeration.
  double max_relative_drift = 0.0;

  // P(S > s), P(S < s) and P(S <= s).
  double tail(double s) const;
  double lower_tail(double s) const;
  double cdf(double s) const;

private:
  DistKind kind_ = DistKind::Exact;
  std::vector<double> values_;
  std::vector<std::uint64_t> counts_;
  std::vector<std::uint64_t> cum_;
  std::uint64_t total_ = 0;
};

struct EnumerationOptions {
  std::size_t max_n = 24;
  unsigned threads = 1;
  // Running sums are recomputed from scratch at this interval.
  std::uint64_t recompute_interval = std::uint64_t{1} << 16;
};

inline constexpr std::size_t kDefaultExactMaxN = 24;
inline constexpr double kAtomMergeTolerance = 1e-10;

// Exact law of ||sum eps_n x_n|| over all sign patterns with eps_1 = +1,
// visited in Gray-code order with one +-2 x_k update per pattern.
DistSummary enumerate_exact(const CoefficientFamily& fam, const EnumerationOptions& opts = {});

// Empirical law from `samples` independent sign vectors. Sign bits come from a
// counter-based generator keyed by (seed, sample index), so the result does
// not depend on `threads`.
DistSummary sample_mc(const CoefficientFamily& fam, std::uint64_t samples, std::uint64_t seed, unsigned threads = 1);

// Y*(t) = inf{s > 0 : P(|Y| > s) <= t}, 0 < t < 1.
double rearrangement(const DistSummary& d, double t);
double tail(const DistSummary& d, double s);
// (E S^p)^{1/p}, p >= 1.
double moment(const DistSummary& d, double p);
double mean(const DistSummary& d);
// sup_{0<t<1} t^{1/p} Y*(t), p > 0.
double weak_lp_rv(const DistSummary& d, double p);
// Luxemburg norm for Psi_q(x) = exp(x^q) - 1, q > 0.
double orlicz_norm(const DistSummary& d, double q);
// sup over 0 < t <= t_max of (log 1/t)^{-1/q} Y*(t).
double orlicz_rearrangement_form(const DistSummary& d, double q, double t_max = 0.5);
// Lower median inf{s : P(S <= s) >= 1/2}.
double median(const DistSummary& d);
// sup_s |F_a(s) - F_b(s)|.
double ks_distance(const DistSummary& a, const DistSummary& b);

} // namespace radsum
