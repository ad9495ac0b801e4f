#include "radsum/kfunctional.hpp"

#include "radsum/errors.hpp"
#include "radsum/spaces.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace radsum {

namespace {

constexpr int kMaxBisection = 200;
constexpr double kRelWidth = 1e-12;

void validate(std::span<const double> a, double t) {
  if (std::isnan(t) || t < 0.0) throw InputError("K-functional parameter t must be nonnegative");
  if (std::isinf(t)) throw InputError("K-functional parameter t must be finite");
  for (double x : a)
    if (!std::isfinite(x)) throw InputError("K-functional sequence entries must be finite");
}

// sum_n min(|a_n| / rho, 1)^2, i.e. (||clamp(a, rho)||_2 / rho)^2.
double clipped_ratio_sq(std::span<const double> a, double rho) {
  double s = 0.0;
  for (double x : a) {
    double r = std::min(std::abs(x) / rho, 1.0);
    s += r * r;
  }
  return s;
}

KValue finish(std::span<const double> a, double t, double rho) {
  KValue k;
  k.t = t;
  k.rho = rho;
  k.l1_part.resize(a.size());
  k.l2_part.resize(a.size());
  for (std::size_t n = 0; n < a.size(); ++n) {
    // |a_n| == rho stays entirely in the l2 part
    double y = std::clamp(a[n], -rho, rho);
    k.l2_part[n] = y;
    k.l1_part[n] = a[n] - y;
  }
  k.value = lp_norm(k.l1_part, 1.0) + t * lp_norm(k.l2_part, 2.0);
  return k;
}

} // namespace

std::vector<double> decreasing_rearrangement(std::span<const double> a) {
  std::vector<double> out(a.size());
  std::transform(a.begin(), a.end(), out.begin(), [](double x) { return std::abs(x); });
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

KValue k12_exact(std::span<const double> a, double t) {
  validate(a, t);
  const double amax = lp_norm(a, std::numeric_limits<double>::infinity());
  if (amax == 0.0 || t == 0.0) {
    // K = 0; the whole sequence goes to the l2 side
    KValue k;
    k.t = t;
    k.rho = amax;
    k.l1_part.assign(a.size(), 0.0);
    k.l2_part.assign(a.begin(), a.end());
    return k;
  }

  std::size_t support = 0;
  for (double x : a)
    if (x != 0.0) ++support;
  // Near rho = 0 the ratio tends to sqrt(support); no positive root when t exceeds it.
  if (t * t >= static_cast<double>(support)) return finish(a, t, 0.0);

  // Pure l2 split: ||a||_2 >= t * max|a_n|.
  if (clipped_ratio_sq(a, amax) >= t * t) return finish(a, t, amax);

  // ||clamp(a, rho)||_2 / rho is strictly decreasing on (0, amax]; find where it equals t.
  double lo = 0.0;
  double hi = amax;
  for (int it = 0; it < kMaxBisection && hi - lo > kRelWidth * hi; ++it) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (clipped_ratio_sq(a, mid) > t * t)
      lo = mid;
    else
      hi = mid;
  }
  KValue best = finish(a, t, 0.5 * (lo + hi));
  // both bracket ends are feasible splits; keep the smaller objective
  for (double rho : {lo, hi}) {
    KValue k = finish(a, t, rho);
    if (k.value < best.value) best = std::move(k);
  }
  return best;
}

double k12_holmstedt(std::span<const double> a, double t) {
  validate(a, t);
  std::vector<double> r = decreasing_rearrangement(a);
  double floor_t2 = std::floor(t * t);
  std::size_t head = floor_t2 >= static_cast<double>(r.size()) ? r.size() : static_cast<std::size_t>(floor_t2);
  double head_sum = 0.0;
  for (std::size_t n = 0; n < head; ++n) head_sum += r[n];
  std::span<const double> tail(r.data() + head, r.size() - head);
  return head_sum + t * lp_norm(tail, 2.0);
}

std::vector<double> k12_dual_certificate(const KValue& k) {
  const std::size_t n = k.l1_part.size();
  std::vector<double> c(n, 0.0);
  double y_norm = lp_norm(k.l2_part, 2.0);
  if (y_norm > 0.0 && k.t > 0.0) {
    for (std::size_t i = 0; i < n; ++i) c[i] = std::clamp(k.t * k.l2_part[i] / y_norm, -1.0, 1.0);
  }
  if (k.rho == 0.0) {
    // pure l1 split
    for (std::size_t i = 0; i < n; ++i) {
      double a = k.l1_part[i] + k.l2_part[i];
      c[i] = a > 0 ? 1.0 : (a < 0 ? -1.0 : 0.0);
    }
  }
  return c;
}

ScalingCheck k12_scaling_bound(std::span<const double> a, double s, double t) {
  if (!(s > 0.0) || !(t > 0.0)) throw InputError("scaling bound needs s > 0 and t > 0");
  ScalingCheck out;
  out.lhs = k12_exact(a, s).value;
  out.rhs = std::max(1.0, s / t) * k12_exact(a, t).value;
  out.margin = out.rhs - out.lhs;
  out.holds = out.margin >= -1e-9;
  return out;
}

} // namespace radsum
