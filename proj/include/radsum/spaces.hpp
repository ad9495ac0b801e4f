#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace radsum {

enum class Family { L1, L2, LInf, Lp };

// A finite-dimensional space l_p^m. L1, L2 and LInf are the canonical tags
// for p = 1, 2, infinity; Lp covers 1 < p < infinity.
class SpaceSpec {
public:
  static SpaceSpec l1(std::size_t dim) { return SpaceSpec(Family::L1, 1.0, dim); }
  static SpaceSpec l2(std::size_t dim) { return SpaceSpec(Family::L2, 2.0, dim); }
  static SpaceSpec linf(std::size_t dim);
  // Rejects p < 1 and non-finite p. Exponents 1 and 2 are normalized to the
  // canonical tags.
  static SpaceSpec lp(double p, std::size_t dim);

  // Parses "l1", "l2", "linf", "lp:<p>", optionally followed by ":<dim>".
  // Without a dimension suffix `default_dim` is used.
  static SpaceSpec parse(const std::string& text, std::size_t default_dim = 0);

  Family family() const noexcept { return family_; }
  // Exponent of the space; +infinity for LInf.
  double p() const noexcept { return p_; }
  // Exponent of the dual space, 1/p + 1/p' = 1.
  double dual_p() const noexcept;
  std::size_t dim() const noexcept { return dim_; }

  SpaceSpec with_dim(std::size_t dim) const;
  // True when the dual unit ball has a finite extreme-point set small enough
  // to enumerate, or the space is one-dimensional.
  bool has_finite_dual_extremes() const noexcept;

  std::string to_string() const;

  bool operator==(const SpaceSpec&) const = default;

private:
  SpaceSpec(Family family, double p, std::size_t dim);

  Family family_;
  double p_;
  std::size_t dim_;
};

// l_p norm of a vector for an arbitrary exponent p in [1, inf].
double lp_norm(std::span<const double> v, double p);

double norm(const SpaceSpec& space, std::span<const double> v);
double dual_norm(const SpaceSpec& space, std::span<const double> v);

// N coefficient vectors x_1..x_N of a space, stored row-major (row n = x_n).
class CoefficientFamily {
public:
  CoefficientFamily(SpaceSpec space, std::vector<double> entries, std::size_t rows);
  CoefficientFamily(SpaceSpec space, const std::vector<std::vector<double>>& rows);

  // One-dimensional family built from a scalar sequence.
  static CoefficientFamily scalar(std::span<const double> a);

  const SpaceSpec& space() const noexcept { return space_; }
  std::size_t size() const noexcept { return rows_; }
  std::size_t dim() const noexcept { return space_.dim(); }

  std::span<const double> row(std::size_t n) const { return {entries_.data() + n * dim(), dim()}; }
  std::vector<double> column(std::size_t j) const;
  std::span<const double> entries() const noexcept { return entries_; }

  bool is_scalar() const noexcept { return dim() == 1; }
  CoefficientFamily scaled(double alpha) const;

private:
  SpaceSpec space_;
  std::vector<double> entries_;
  std::size_t rows_;
};

// A functional x* on the space, carried together with its dual norm.
struct DualFunctional {
  std::vector<double> vector;
  double certified_norm = 0.0;

  static DualFunctional make(const SpaceSpec& space, std::vector<double> v);
};

// (x*(x_n))_n.
std::vector<double> apply_dual(const DualFunctional& functional, const CoefficientFamily& fam);
std::vector<double> apply_dual(std::span<const double> functional, const CoefficientFamily& fam);

struct DualSphere {
  double dual_p;
  std::size_t dim;
};

using DualExtremes = std::variant<std::vector<std::vector<double>>, DualSphere>;

// Extreme points of the dual unit ball: +-e_j for LInf, the sign cube for
// L1 (dim <= 20), otherwise the sphere descriptor.
DualExtremes dual_extreme_points(const SpaceSpec& space);

inline constexpr std::size_t kMaxL1VertexDim = 20;

} // namespace radsum
