#include "radsum/csv_io.hpp"

#include "radsum/errors.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace radsum {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  for (std::string cell; std::getline(ss, cell, ',');) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

} // namespace

std::vector<std::vector<double>> read_coefficients_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open coefficient file '" + path.string() + "'");
  std::vector<std::vector<double>> rows;
  std::size_t columns = 0;
  bool have_header = false;
  std::size_t line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    auto cells = split(t);
    const std::string where = path.string() + ":" + std::to_string(line_no);
    if (!have_header) {
      for (std::size_t j = 0; j < cells.size(); ++j)
        if (cells[j] != "j" + std::to_string(j + 1))
          throw InputError(where + ": expected header j1,...,jm but found '" + cells[j] + "'");
      columns = cells.size();
      have_header = true;
      continue;
    }
    if (cells.size() != columns)
      throw InputError(where + ": row has " + std::to_string(cells.size()) + " fields, header has " +
                       std::to_string(columns));
    std::vector<double> row(columns);
    for (std::size_t j = 0; j < columns; ++j) {
      const std::string& c = cells[j];
      auto [ptr, ec] = std::from_chars(c.data(), c.data() + c.size(), row[j]);
      if (ec != std::errc() || ptr != c.data() + c.size())
        throw InputError(where + ": cannot parse '" + c + "' as a number");
    }
    rows.push_back(std::move(row));
  }
  if (!have_header) throw InputError("coefficient file '" + path.string() + "' is empty");
  if (rows.empty()) throw InputError("coefficient file '" + path.string() + "' has no coefficient rows");
  return rows;
}

std::string format_double(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc()) return "nan";
  return std::string(buf, ptr);
}

} // namespace radsum
