#pragma once

#include "radsum/spaces.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace radsum {

// Reads coefficient vectors from a CSV file with header j1,...,jm and one row
// per x_n. Blank lines and lines starting with '#' are ignored.
std::vector<std::vector<double>> read_coefficients_csv(const std::filesystem::path& path);

// Shortest decimal text that reads back to the same double.
std::string format_double(double x);

} // namespace radsum
