#include "radsum/distribution.hpp"

#include "radsum/errors.hpp"
#include "radsum/parallel.hpp"
#include "radsum/random.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>

namespace radsum {

std::string to_string(DistKind k) { return k == DistKind::Exact ? "EXACT" : "EMPIRICAL"; }

DistSummary DistSummary::from_observations(DistKind kind, std::vector<double> obs, double merge_tolerance) {
  if (obs.empty()) throw InputError("distribution needs at least one observation");
  std::sort(obs.begin(), obs.end());
  DistSummary d;
  d.kind_ = kind;
  d.total_ = obs.size();
  const double tol = merge_tolerance * std::max(std::abs(obs.front()), std::abs(obs.back()));
  for (double v : obs) {
    if (!d.values_.empty() && v - d.values_.back() <= tol) {
      ++d.counts_.back();
    } else {
      d.values_.push_back(v);
      d.counts_.push_back(1);
    }
  }
  d.cum_.resize(d.counts_.size());
  std::partial_sum(d.counts_.begin(), d.counts_.end(), d.cum_.begin());
  return d;
}

std::vector<Atom> DistSummary::atoms() const {
  std::vector<Atom> out;
  out.reserve(size());
  for (std::size_t i = 0; i < size(); ++i) out.push_back({values_[i], probability(i)});
  return out;
}

double DistSummary::tail(double s) const {
  auto it = std::upper_bound(values_.begin(), values_.end(), s);
  if (it == values_.begin()) return 1.0;
  std::uint64_t le = cum_[static_cast<std::size_t>(it - values_.begin()) - 1];
  return static_cast<double>(total_ - le) / static_cast<double>(total_);
}

double DistSummary::lower_tail(double s) const {
  auto it = std::lower_bound(values_.begin(), values_.end(), s);
  if (it == values_.begin()) return 0.0;
  return static_cast<double>(cum_[static_cast<std::size_t>(it - values_.begin()) - 1]) / static_cast<double>(total_);
}

double DistSummary::cdf(double s) const { return 1.0 - tail(s); }

namespace {

void check_capacity(const CoefficientFamily& fam, std::size_t max_n) {
  if (fam.size() > max_n)
    throw CapacityError("exact enumeration of N = " + std::to_string(fam.size()) + " terms exceeds the limit N <= " +
                        std::to_string(max_n) + "; use Monte Carlo sampling (--mc) or raise --exact-max-n");
  if (fam.size() > 62) throw CapacityError("exact enumeration is limited to N <= 62 terms");
}

struct ChunkResult {
  std::vector<double> values;
  double drift = 0.0;
};

} // namespace

DistSummary enumerate_exact(const CoefficientFamily& fam, const EnumerationOptions& opts) {
  check_capacity(fam, opts.max_n);
  const std::size_t n_terms = fam.size();
  const std::size_t m = fam.dim();
  const SpaceSpec& space = fam.space();

  // Term 0 is fixed to +1. The highest `prefix_bits` free terms select a chunk;
  // the remaining `low_bits` terms are walked in Gray-code order inside it.
  const std::size_t free_terms = n_terms - 1;
  const std::size_t prefix_bits = std::min<std::size_t>(free_terms, 8);
  const std::size_t low_bits = free_terms - prefix_bits;
  const std::size_t chunks = std::size_t{1} << prefix_bits;
  const std::uint64_t per_chunk = std::uint64_t{1} << low_bits;
  const std::uint64_t interval = std::max<std::uint64_t>(1, opts.recompute_interval);

  std::vector<ChunkResult> results(chunks);
  parallel_for(chunks, opts.threads, [&](std::size_t c) {
    std::vector<double> signs(n_terms, 1.0);
    for (std::size_t b = 0; b < prefix_bits; ++b) signs[1 + low_bits + b] = (c >> b & 1U) ? -1.0 : 1.0;
    std::vector<double> sum(m), fresh(m);
    auto recompute = [&](std::vector<double>& out) {
      std::fill(out.begin(), out.end(), 0.0);
      for (std::size_t n = 0; n < n_terms; ++n) {
        auto x = fam.row(n);
        for (std::size_t j = 0; j < m; ++j) out[j] += signs[n] * x[j];
      }
    };
    recompute(sum);
    ChunkResult& res = results[c];
    res.values.resize(per_chunk);
    res.values[0] = norm(space, sum);
    for (std::uint64_t i = 1; i < per_chunk; ++i) {
      std::size_t k = 1 + static_cast<std::size_t>(std::countr_zero(i));
      signs[k] = -signs[k];
      auto x = fam.row(k);
      const double step = 2.0 * signs[k];
      for (std::size_t j = 0; j < m; ++j) sum[j] += step * x[j];
      if (i % interval == 0) {
        recompute(fresh);
        double scale = std::max(1.0, lp_norm(fresh, std::numeric_limits<double>::infinity()));
        for (std::size_t j = 0; j < m; ++j) res.drift = std::max(res.drift, std::abs(sum[j] - fresh[j]) / scale);
        sum.swap(fresh);
      }
      res.values[i] = norm(space, sum);
    }
  });

  std::vector<double> all;
  all.reserve(chunks * per_chunk);
  double drift = 0.0;
  for (auto& r : results) {
    all.insert(all.end(), r.values.begin(), r.values.end());
    drift = std::max(drift, r.drift);
    std::vector<double>().swap(r.values);
  }
  DistSummary d = DistSummary::from_observations(DistKind::Exact, std::move(all), kAtomMergeTolerance);
  d.n_terms = n_terms;
  d.max_relative_drift = drift;
  return d;
}

DistSummary sample_mc(const CoefficientFamily& fam, std::uint64_t samples, std::uint64_t seed, unsigned threads) {
  if (samples == 0) throw InputError("Monte Carlo needs at least one sample");
  const std::size_t n_terms = fam.size();
  const std::size_t m = fam.dim();
  constexpr std::uint64_t kBlock = 4096;
  const std::uint64_t blocks = (samples + kBlock - 1) / kBlock;
  std::vector<double> values(samples);
  parallel_for(static_cast<std::size_t>(blocks), threads, [&](std::size_t b) {
    std::vector<double> sum(m);
    const std::uint64_t begin = b * kBlock;
    const std::uint64_t end = std::min(samples, begin + kBlock);
    for (std::uint64_t s = begin; s < end; ++s) {
      std::fill(sum.begin(), sum.end(), 0.0);
      std::uint64_t bits = 0;
      for (std::size_t n = 0; n < n_terms; ++n) {
        if (n % 64 == 0) bits = counter_bits(seed, s, n / 64);
        const double eps = (bits >> (n % 64) & 1U) ? -1.0 : 1.0;
        auto x = fam.row(n);
        for (std::size_t j = 0; j < m; ++j) sum[j] += eps * x[j];
      }
      values[s] = norm(fam.space(), sum);
    }
  });
  DistSummary d = DistSummary::from_observations(DistKind::Empirical, std::move(values), kAtomMergeTolerance);
  d.n_terms = n_terms;
  d.sample_count = samples;
  d.seed = seed;
  return d;
}

double tail(const DistSummary& d, double s) { return d.tail(s); }

double rearrangement(const DistSummary& d, double t) {
  if (!(t > 0.0 && t < 1.0)) throw InputError("rearrangement argument must lie in (0, 1)");
  const double limit = t * static_cast<double>(d.total());
  auto counts = d.counts();
  std::uint64_t above = d.total();
  for (std::size_t i = 0; i < d.size(); ++i) {
    above -= counts[i];
    // P(S > s) = above / total for s in [v_i, v_{i+1})
    if (static_cast<double>(above) <= limit) return d.values()[i];
  }
  return d.max();
}

double moment(const DistSummary& d, double p) {
  if (std::isnan(p) || p < 1.0) throw InputError("moment order must satisfy p >= 1");
  const double total = static_cast<double>(d.total());
  if (p > 64.0) {
    double top = -std::numeric_limits<double>::infinity();
    std::vector<double> logs;
    for (std::size_t i = 0; i < d.size(); ++i) {
      if (d.values()[i] <= 0.0) continue;
      double l = std::log(static_cast<double>(d.counts()[i]) / total) + p * std::log(d.values()[i]);
      logs.push_back(l);
      top = std::max(top, l);
    }
    if (logs.empty()) return 0.0;
    double s = 0.0;
    for (double l : logs) s += std::exp(l - top);
    return std::exp((top + std::log(s)) / p);
  }
  double s = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i)
    s += static_cast<double>(d.counts()[i]) / total * std::pow(d.values()[i], p);
  return std::pow(s, 1.0 / p);
}

double mean(const DistSummary& d) {
  double s = 0.0;
  const double total = static_cast<double>(d.total());
  for (std::size_t i = 0; i < d.size(); ++i) s += static_cast<double>(d.counts()[i]) / total * d.values()[i];
  return s;
}

double weak_lp_rv(const DistSummary& d, double p) {
  if (!(p > 0.0)) throw InputError("weak L_p order must be positive");
  // On the constancy interval of Y* with value v_i the supremum of t^{1/p} v_i
  // is reached at its right end, t = P(S >= v_i).
  double best = 0.0;
  std::uint64_t at_least = d.total();
  for (std::size_t i = 0; i < d.size(); ++i) {
    double t = static_cast<double>(at_least) / static_cast<double>(d.total());
    best = std::max(best, std::pow(t, 1.0 / p) * d.values()[i]);
    at_least -= d.counts()[i];
  }
  return best;
}

double orlicz_norm(const DistSummary& d, double q) {
  if (!(q > 0.0)) throw InputError("Orlicz exponent q must be positive");
  const double vmax = d.max();
  if (vmax <= 0.0) return 0.0;
  const double total = static_cast<double>(d.total());
  auto expected_psi = [&](double c) {
    double s = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
      if (d.values()[i] <= 0.0) continue;
      s += static_cast<double>(d.counts()[i]) / total * std::expm1(std::pow(d.values()[i] / c, q));
    }
    return s;
  };
  double w_min = 1.0;
  for (std::size_t i = 0; i < d.size(); ++i) w_min = std::min(w_min, d.probability(i));
  const double k = 1.0 + std::ceil(std::log2(1.0 / w_min));
  double lo = vmax / std::pow(k * std::log(2.0), 1.0 / q);
  double hi = vmax / std::pow(std::log(2.0), 1.0 / q);
  // E Psi(S/c) is decreasing in c; lo is infeasible, hi feasible
  for (int it = 0; it < 400 && hi - lo > 1e-10 * hi; ++it) {
    double mid = 0.5 * (lo + hi);
    if (expected_psi(mid) > 1.0)
      lo = mid;
    else
      hi = mid;
  }
  return hi;
}

double orlicz_rearrangement_form(const DistSummary& d, double q, double t_max) {
  if (!(q > 0.0)) throw InputError("Orlicz exponent q must be positive");
  if (!(t_max > 0.0 && t_max < 1.0)) throw InputError("t_max must lie in (0, 1)");
  // (log 1/t)^{-1/q} increases in t, so on each constancy interval of Y* the
  // supremum is at the interval's right end, clipped to t_max.
  const double total = static_cast<double>(d.total());
  double best = 0.0;
  std::uint64_t at_least = d.total();
  for (std::size_t i = 0; i < d.size(); ++i) {
    double right = static_cast<double>(at_least) / total;
    std::uint64_t above = at_least - d.counts()[i];
    double left = static_cast<double>(above) / total;
    at_least = above;
    if (left >= t_max) continue;
    double t = std::min(right, t_max);
    best = std::max(best, d.values()[i] * std::pow(std::log(1.0 / t), -1.0 / q));
  }
  return best;
}

double median(const DistSummary& d) {
  std::uint64_t cum = 0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    cum += d.counts()[i];
    if (2 * cum >= d.total()) return d.values()[i];
  }
  return d.max();
}

double ks_distance(const DistSummary& a, const DistSummary& b) {
  double best = 0.0;
  for (const DistSummary* d : {&a, &b})
    for (double v : d->values()) best = std::max(best, std::abs(a.cdf(v) - b.cdf(v)));
  return best;
}

} // namespace radsum
