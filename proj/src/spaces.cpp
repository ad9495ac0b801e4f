#include "radsum/spaces.hpp"

#include "radsum/csv_io.hpp"
#include "radsum/errors.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <sstream>

namespace radsum {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

double parse_number(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw InputError("");
    return v;
  } catch (const std::exception&) {
    throw InputError("invalid " + what + " '" + s + "'");
  }
}

} // namespace

SpaceSpec::SpaceSpec(Family family, double p, std::size_t dim) : family_(family), p_(p), dim_(dim) {
  if (dim == 0) throw InputError("space dimension must be at least 1");
}

SpaceSpec SpaceSpec::linf(std::size_t dim) {
  return SpaceSpec(Family::LInf, std::numeric_limits<double>::infinity(), dim);
}

SpaceSpec SpaceSpec::lp(double p, std::size_t dim) {
  if (std::isnan(p) || p < 1.0) throw InputError("l_p exponent must satisfy p >= 1 (got " + format_double(p) + ")");
  if (std::isinf(p)) return linf(dim);
  if (p == 1.0) return l1(dim);
  if (p == 2.0) return l2(dim);
  return SpaceSpec(Family::Lp, p, dim);
}

SpaceSpec SpaceSpec::parse(const std::string& text, std::size_t default_dim) {
  std::vector<std::string> parts;
  std::stringstream ss(lower(text));
  for (std::string part; std::getline(ss, part, ':');) parts.push_back(part);
  if (parts.empty()) throw InputError("empty space specification");

  std::size_t dim = default_dim;
  auto take_dim = [&](std::size_t idx) {
    if (parts.size() > idx + 1) throw InputError("malformed space specification '" + text + "'");
    if (parts.size() == idx + 1) {
      double d = parse_number(parts[idx], "space dimension");
      if (d < 1 || d != std::floor(d)) throw InputError("invalid space dimension in '" + text + "'");
      auto parsed = static_cast<std::size_t>(d);
      if (default_dim != 0 && parsed != default_dim)
        throw InputError("space '" + text + "' has dimension " + std::to_string(parsed) +
                         " but the coefficients have " + std::to_string(default_dim) + " columns");
      dim = parsed;
    }
    if (dim == 0) throw InputError("space '" + text + "' needs a dimension");
  };

  const std::string& tag = parts[0];
  if (tag == "l1") {
    take_dim(1);
    return l1(dim);
  }
  if (tag == "l2") {
    take_dim(1);
    return l2(dim);
  }
  if (tag == "linf") {
    take_dim(1);
    return linf(dim);
  }
  if (tag == "lp") {
    if (parts.size() < 2) throw InputError("lp space needs an exponent, e.g. lp:3");
    double p = parse_number(parts[1], "exponent");
    take_dim(2);
    return lp(p, dim);
  }
  throw InputError("unknown space family '" + parts[0] + "'");
}

double SpaceSpec::dual_p() const noexcept {
  switch (family_) {
  case Family::L1: return std::numeric_limits<double>::infinity();
  case Family::LInf: return 1.0;
  case Family::L2: return 2.0;
  case Family::Lp: return p_ / (p_ - 1.0);
  }
  return 2.0;
}

SpaceSpec SpaceSpec::with_dim(std::size_t dim) const { return SpaceSpec(family_, p_, dim); }

bool SpaceSpec::has_finite_dual_extremes() const noexcept {
  return dim_ == 1 || family_ == Family::LInf || (family_ == Family::L1 && dim_ <= kMaxL1VertexDim);
}

std::string SpaceSpec::to_string() const {
  std::ostringstream os;
  switch (family_) {
  case Family::L1: os << "l1"; break;
  case Family::L2: os << "l2"; break;
  case Family::LInf: os << "linf"; break;
  case Family::Lp: os << "lp:" << p_; break;
  }
  os << ':' << dim_;
  return os.str();
}

double lp_norm(std::span<const double> v, double p) {
  if (std::isinf(p)) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
  }
  if (p == 1.0) {
    double s = 0.0;
    for (double x : v) s += std::abs(x);
    return s;
  }
  if (p == 2.0) {
    // scaled to avoid overflow for large entries
    double scale = lp_norm(v, std::numeric_limits<double>::infinity());
    if (scale == 0.0) return 0.0;
    double s = 0.0;
    for (double x : v) s += (x / scale) * (x / scale);
    return scale * std::sqrt(s);
  }
  double scale = lp_norm(v, std::numeric_limits<double>::infinity());
  if (scale == 0.0) return 0.0;
  double s = 0.0;
  for (double x : v) s += std::pow(std::abs(x) / scale, p);
  return scale * std::pow(s, 1.0 / p);
}

double norm(const SpaceSpec& space, std::span<const double> v) {
  if (v.size() != space.dim())
    throw InputError("vector of length " + std::to_string(v.size()) + " does not match space dimension " +
                     std::to_string(space.dim()));
  return lp_norm(v, space.p());
}

double dual_norm(const SpaceSpec& space, std::span<const double> v) {
  if (v.size() != space.dim())
    throw InputError("functional of length " + std::to_string(v.size()) + " does not match space dimension " +
                     std::to_string(space.dim()));
  return lp_norm(v, space.dual_p());
}

CoefficientFamily::CoefficientFamily(SpaceSpec space, std::vector<double> entries, std::size_t rows)
    : space_(space), entries_(std::move(entries)), rows_(rows) {
  if (rows_ == 0) throw InputError("coefficient family needs at least one vector");
  if (entries_.size() != rows_ * space_.dim())
    throw InputError("coefficient matrix has " + std::to_string(entries_.size()) + " entries, expected " +
                     std::to_string(rows_) + " x " + std::to_string(space_.dim()));
  for (double x : entries_)
    if (!std::isfinite(x)) throw InputError("coefficient entries must be finite");
}

namespace {
std::vector<double> flatten(const SpaceSpec& space, const std::vector<std::vector<double>>& rows) {
  std::vector<double> out;
  out.reserve(rows.size() * space.dim());
  for (std::size_t n = 0; n < rows.size(); ++n) {
    if (rows[n].size() != space.dim())
      throw InputError("coefficient row " + std::to_string(n + 1) + " has " + std::to_string(rows[n].size()) +
                       " entries, expected " + std::to_string(space.dim()));
    out.insert(out.end(), rows[n].begin(), rows[n].end());
  }
  return out;
}
} // namespace

CoefficientFamily::CoefficientFamily(SpaceSpec space, const std::vector<std::vector<double>>& rows)
    : CoefficientFamily(space, flatten(space, rows), rows.size()) {}

CoefficientFamily CoefficientFamily::scalar(std::span<const double> a) {
  return CoefficientFamily(SpaceSpec::linf(1), std::vector<double>(a.begin(), a.end()), a.size());
}

std::vector<double> CoefficientFamily::column(std::size_t j) const {
  std::vector<double> col(rows_);
  for (std::size_t n = 0; n < rows_; ++n) col[n] = entries_[n * dim() + j];
  return col;
}

CoefficientFamily CoefficientFamily::scaled(double alpha) const {
  std::vector<double> e = entries_;
  for (double& x : e) x *= alpha;
  return CoefficientFamily(space_, std::move(e), rows_);
}

DualFunctional DualFunctional::make(const SpaceSpec& space, std::vector<double> v) {
  double n = dual_norm(space, v);
  return DualFunctional{std::move(v), n};
}

std::vector<double> apply_dual(std::span<const double> functional, const CoefficientFamily& fam) {
  if (functional.size() != fam.dim())
    throw InputError("functional of length " + std::to_string(functional.size()) +
                     " does not match space dimension " + std::to_string(fam.dim()));
  std::vector<double> out(fam.size(), 0.0);
  for (std::size_t n = 0; n < fam.size(); ++n) {
    auto x = fam.row(n);
    double s = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) s += functional[j] * x[j];
    out[n] = s;
  }
  return out;
}

std::vector<double> apply_dual(const DualFunctional& functional, const CoefficientFamily& fam) {
  return apply_dual(std::span<const double>(functional.vector), fam);
}

DualExtremes dual_extreme_points(const SpaceSpec& space) {
  const std::size_t m = space.dim();
  if (space.family() == Family::LInf || m == 1) {
    std::vector<std::vector<double>> pts;
    pts.reserve(2 * m);
    for (std::size_t j = 0; j < m; ++j) {
      for (double sign : {1.0, -1.0}) {
        std::vector<double> e(m, 0.0);
        e[j] = sign;
        pts.push_back(std::move(e));
      }
    }
    return pts;
  }
  if (space.family() == Family::L1) {
    if (m > kMaxL1VertexDim)
      throw CapacityError("l1 dual cube has 2^" + std::to_string(m) + " vertices; limit is 2^" +
                          std::to_string(kMaxL1VertexDim));
    std::vector<std::vector<double>> pts;
    pts.reserve(std::size_t{1} << m);
    for (std::size_t mask = 0; mask < (std::size_t{1} << m); ++mask) {
      std::vector<double> v(m);
      for (std::size_t j = 0; j < m; ++j) v[j] = (mask >> j & 1U) ? -1.0 : 1.0;
      pts.push_back(std::move(v));
    }
    return pts;
  }
  return DualSphere{space.dual_p(), m};
}

} // namespace radsum
