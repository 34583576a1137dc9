#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "wpgd/error.hpp"
#include "wpgd/ot/cost_matrix.hpp"

namespace wpgd::ot {

/// Parses a K x K matrix from JSON (nested arrays, or {"matrix": [[...]]})
/// or CSV (one row per line, '#' starts a comment line).
inline std::vector<std::vector<double>> parse_matrix_text(const std::string& text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) throw ValidationError("cost matrix file is empty");
  if (text[first] == '[' || text[first] == '{') {
    try {
      auto j = nlohmann::json::parse(text);
      if (j.is_object()) j = j.at("matrix");
      return j.get<std::vector<std::vector<double>>>();
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(std::string("cost matrix JSON: ") + e.what(), e.byte);
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError(std::string("cost matrix JSON: ") + e.what());
    }
  }
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  std::size_t offset = 0;
  while (std::getline(in, line)) {
    const std::size_t line_start = offset;
    offset += line.size() + 1;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos || line[line.find_first_not_of(" \t")] == '#')
      continue;
    std::vector<double> row;
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
        if (cell.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument("");
      } catch (const std::exception&) {
        throw ParseError("cost matrix CSV: bad number '" + cell + "'", line_start);
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

inline CostMatrix load_cost_matrix(const std::filesystem::path& path, double p = 1.0) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open cost matrix " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return CostMatrix::validate(parse_matrix_text(ss.str()), p);
}

}  // namespace wpgd::ot
