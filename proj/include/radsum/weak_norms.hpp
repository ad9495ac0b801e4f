#pragma once

#include "radsum/spaces.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace radsum {

// EXACT: the dual-ball supremum was taken over a finite extreme-point set or
// computed in closed form. LOWER_BOUND: best value found by search.
enum class Exactness { Exact, LowerBound };

std::string to_string(Exactness e);

struct AscentOptions {
  int restarts = 64;
  int steps = 500;
  double step_decay = 0.95;
  std::uint64_t seed = 0;
};

struct WeakNormOptions {
  // Throw CapacityError instead of falling back to a lower bound.
  bool require_exact = false;
  AscentOptions ascent{};
  // Upper limit on N for sign-pattern enumeration (l^w_1 in general spaces).
  std::size_t max_sign_enumeration = 24;
};

struct WeakNormResult {
  double value = 0.0;
  Exactness exactness = Exactness::Exact;
  DualFunctional witness;
};

// l^w_p((x_n)) = sup_{||x*|| <= 1} ||(x*(x_n))||_p.
WeakNormResult weak_lp_norm(const CoefficientFamily& fam, double p, const WeakNormOptions& opts = {});

struct KwValue {
  double t = 0.0;
  double value = 0.0;
  Exactness exactness = Exactness::Exact;
  DualFunctional witness;
};

// K^w_{1,2}((x_n), t) = sup_{||x*|| <= 1} K_{1,2}((x*(x_n)), t). Exact for
// LInf (max over columns), L1 with dim <= 20 (max over sign vertices) and
// one-dimensional spaces. Optional `seeds` are extra starting functionals for
// the search in the other spaces.
KwValue kw12(const CoefficientFamily& fam, double t, const WeakNormOptions& opts = {},
             std::span<const std::vector<double>> seeds = {});

struct KProfile {
  std::vector<double> grid;
  std::vector<KwValue> points;
  double lipschitz_bound = 0.0;
  Exactness lipschitz_exactness = Exactness::Exact;
  // Monotone and within lipschitz_bound * dt + 1e-9 between neighbours.
  bool lipschitz_ok = true;

  bool all_exact() const;
};

// Requires a strictly increasing nonnegative grid. Lower-bound points reuse
// the previous point's witness so the profile stays nondecreasing.
KProfile kw_profile(const CoefficientFamily& fam, std::span<const double> grid, const WeakNormOptions& opts = {});

struct Lemma2Split {
  double t = 0.0;
  CoefficientFamily l1_part;
  CoefficientFamily l2_part;
  double l1_weak = 0.0; // l^w_1 of the l1 part
  double l2_weak = 0.0; // l^w_2 of the l2 part
  double bound = 0.0;   // l1_weak + t * l2_weak
  double kw = 0.0;
  bool certified = false; // bound <= 2 kw + 1e-8
};

// Coordinatewise optimal splitting of an LInf family; its cost bounds
// K((x_n), t; l^w_1, l^w_2) from above.
Lemma2Split lemma2_split(const CoefficientFamily& fam, double t);

// ||(a_n)||_{p,inf} = sup_n n^{1/p} a*_n.
double weak_sequence_norm(std::span<const double> a, double p);

// max over the columns of ||(x_{n,j})_n||_{p,inf}, i.e. over the extreme points
// +-e_j of the l1 dual ball. Exact for one-dimensional families; a lower bound
// of the dual-ball supremum otherwise (the weak quasi-norm is not convex).
// Only LInf and one-dimensional families are supported.
WeakNormResult dual_weak_sequence_norm(const CoefficientFamily& fam, double p);

// Functional of dual norm 1 with x*(v) = ||v||, or zero for v = 0.
DualFunctional norming_functional(const SpaceSpec& space, std::span<const double> v);

} // namespace radsum
