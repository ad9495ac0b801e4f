#pragma once

#include <span>
#include <vector>

namespace radsum {

// K(a, t; l1, l2) together with a split a = l1_part + l2_part realizing it.
struct KValue {
  double t = 0.0;
  double value = 0.0;
  // Clipping threshold: l2_part = clamp(a, -rho, rho).
  double rho = 0.0;
  std::vector<double> l1_part;
  std::vector<double> l2_part;
};

// |a| sorted in decreasing order.
std::vector<double> decreasing_rearrangement(std::span<const double> a);

// Exact K_{1,2}(a, t) via the clipping characterization of the optimal split.
// The threshold rho solves ||clamp(a, rho)||_2 = t * rho and is found by
// bisection on [0, max|a_n|].
KValue k12_exact(std::span<const double> a, double t);

// Two-term surrogate sum_{n <= floor(t^2)} a*_n + t * (sum_{n > floor(t^2)} a*_n^2)^{1/2}.
// Always an upper bound for k12_exact.
double k12_holmstedt(std::span<const double> a, double t);

// A maximizer c of <a, c> over {||c||_inf <= 1, ||c||_2 <= t}; <a, c> = K(a, t).
// Used as the subgradient of K with respect to a.
std::vector<double> k12_dual_certificate(const KValue& k);

struct ScalingCheck {
  double lhs = 0.0; // K(s)
  double rhs = 0.0; // max(1, s/t) K(t)
  double margin = 0.0;
  bool holds = false;
};

// K(a, s) <= max(1, s/t) K(a, t); holds when margin >= -1e-9.
ScalingCheck k12_scaling_bound(std::span<const double> a, double s, double t);

} // namespace radsum
