#pragma once

// Field export: legacy-VTK structured grids and a CSV fallback. Numbers are
// written with 17 significant digits so that doubles survive a round trip.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "surfcalc/calculus.hpp"
#include "surfcalc/geometry.hpp"

namespace surfcalc {

class ExportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Named scalar and tangent fields sharing one grid.
struct FieldSet {
  std::vector<std::pair<std::string, ScalarGrid>> scalars;
  std::vector<std::pair<std::string, TangentField>> vectors;

  FieldSet& add(std::string name, ScalarGrid f) {
    scalars.emplace_back(std::move(name), std::move(f));
    return *this;
  }
  FieldSet& add(std::string name, TangentField f) {
    vectors.emplace_back(std::move(name), std::move(f));
    return *this;
  }
};

namespace detail {

inline std::string g17(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline void check_fields(const MetricGrids& metric, const FieldSet& fields) {
  for (const auto& [name, f] : fields.scalars) {
    require_same_grid(metric.grid(), f.grid(), "export_fields");
  }
  for (const auto& [name, f] : fields.vectors) {
    require_same_grid(metric.grid(), f.grid(), "export_fields");
  }
}

inline std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ExportError(path.string() + ": cannot open for writing");
  return out;
}

inline void finish_output(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw ExportError(path.string() + ": write failed");
}

}  // namespace detail

/// Legacy-VTK ASCII STRUCTURED_GRID with N x N points (u fastest), the
/// embedding as coordinates, tangent fields in ambient components.
inline void write_vtk(const MetricGrids& metric, const FieldSet& fields,
                      const std::filesystem::path& path) {
  using detail::g17;
  detail::check_fields(metric, fields);
  const Grid& grid = metric.grid();
  const std::size_t np = grid.points();
  const auto& x = metric.surface.position;

  std::ofstream out = detail::open_output(path);
  out << "# vtk DataFile Version 3.0\n"
      << "surfcalc fields N=" << grid.size() << "\n"
      << "ASCII\n"
      << "DATASET STRUCTURED_GRID\n"
      << "DIMENSIONS " << grid.size() << ' ' << grid.size() << " 1\n"
      << "POINTS " << np << " double\n";
  for (std::size_t i = 0; i < np; ++i) {
    out << g17(x.x[i]) << ' ' << g17(x.y[i]) << ' ' << g17(x.z[i]) << '\n';
  }
  if (!fields.scalars.empty() || !fields.vectors.empty()) out << "POINT_DATA " << np << '\n';
  for (const auto& [name, f] : fields.scalars) {
    out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (std::size_t i = 0; i < np; ++i) out << g17(f[i]) << '\n';
  }
  for (const auto& [name, f] : fields.vectors) {
    const VectorGrid a = to_ambient(metric, f);
    out << "VECTORS " << name << " double\n";
    for (std::size_t i = 0; i < np; ++i) {
      out << g17(a.x[i]) << ' ' << g17(a.y[i]) << ' ' << g17(a.z[i]) << '\n';
    }
  }
  detail::finish_output(out, path);
}

/// CSV with columns u, v, x, y, z, then one column per scalar and three
/// (name_x, name_y, name_z) per tangent field.
inline void write_fields_csv(const MetricGrids& metric, const FieldSet& fields,
                             const std::filesystem::path& path) {
  using detail::g17;
  detail::check_fields(metric, fields);
  const Grid& grid = metric.grid();
  const auto& x = metric.surface.position;

  std::vector<VectorGrid> ambient;
  for (const auto& [name, f] : fields.vectors) ambient.push_back(to_ambient(metric, f));

  std::ofstream out = detail::open_output(path);
  out << "u,v,x,y,z";
  for (const auto& [name, f] : fields.scalars) out << ',' << name;
  for (const auto& [name, f] : fields.vectors) {
    out << ',' << name << "_x," << name << "_y," << name << "_z";
  }
  out << '\n';
  const int n = grid.size();
  for (int l = 0; l < n; ++l) {
    for (int k = 0; k < n; ++k) {
      const std::size_t i = grid.linear(k, l);
      out << g17(grid.node(k)) << ',' << g17(grid.node(l)) << ',' << g17(x.x[i]) << ','
          << g17(x.y[i]) << ',' << g17(x.z[i]);
      for (const auto& [name, f] : fields.scalars) out << ',' << g17(f[i]);
      for (const auto& a : ambient) {
        out << ',' << g17(a.x[i]) << ',' << g17(a.y[i]) << ',' << g17(a.z[i]);
      }
      out << '\n';
    }
  }
  detail::finish_output(out, path);
}

/// Writes `stem`.vtk and `stem`.csv.
inline void export_fields(const MetricGrids& metric, const FieldSet& fields,
                          const std::filesystem::path& stem) {
  std::filesystem::path vtk = stem, csv = stem;
  vtk += ".vtk";
  csv += ".csv";
  write_vtk(metric, fields, vtk);
  write_fields_csv(metric, fields, csv);
}

/// A numeric CSV table as written by write_fields_csv.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  std::size_t column(const std::string& name) const {
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (header[c] == name) return c;
    }
    throw std::out_of_range("CsvTable: no column '" + name + "'");
  }
};

inline CsvTable read_csv_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ExportError(path.string() + ": cannot open for reading");
  CsvTable table;
  std::string line;
  auto split = [](const std::string& s) {
    std::vector<std::string> cells;
    std::stringstream ss(s);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    return cells;
  };
  if (!std::getline(in, line)) throw ExportError(path.string() + ": empty file");
  table.header = split(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != table.header.size()) {
      throw ExportError(path.string() + ": ragged row");
    }
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& c : cells) row.push_back(std::stod(c));
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace surfcalc
