#pragma once

// Independent reference computations used only by the tests. None of these
// call into the solver paths they are used to check.

#include "radsum/spaces.hpp"

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

namespace radsum::oracle {

// Euclidean projection of z onto {||c||_inf <= 1, ||c||_2 <= t}.
std::vector<double> project_box_ball(std::span<const double> z, double t);

// max <a, c> over {||c||_inf <= 1, ||c||_2 <= t} by projected ascent with
// geometrically growing steps from `restarts` random feasible points.
double k12_dual_program(std::span<const double> a, double t, int restarts, std::mt19937_64& rng);

// min over a grid of l2 parts y in [-r, r]^2 of ||a - y||_1 + t ||y||_2 (N = 2).
double k12_grid_search_2d(std::span<const double> a, double t, int cells_per_axis);

// Every sign pattern (all 2^N, no symmetry reduction), sum recomputed from
// scratch; returns the sorted norms.
std::vector<double> naive_norms(const CoefficientFamily& fam);

// max over theta of ||(x*(x_n))||_p with x* = (cos theta, sin theta); m = 2.
double l2_weak_norm_by_angles(const CoefficientFamily& fam, double p, int angles);

// max over a net of the l1 unit sphere in dimension m <= 3 of f(x*).
double max_over_l1_net(std::size_t m, int resolution, const std::function<double(std::span<const double>)>& f);

std::vector<double> random_vector(std::size_t n, std::mt19937_64& rng, double scale = 1.0);

} // namespace radsum::oracle
