#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <string>
#include <unordered_set>
#include <vector>

#include "rparp/csv.hpp"
#include "rparp/errors.hpp"

namespace rparp {

// Observation locations s_1..s_D with planar coordinates.
struct SiteSet {
  std::vector<std::string> ids;
  Eigen::Matrix<double, Eigen::Dynamic, 2> coords;

  std::size_t size() const { return ids.size(); }

  std::size_t index_of(const std::string& id) const {
    for (std::size_t i = 0; i < ids.size(); ++i)
      if (ids[i] == id) return i;
    throw validation_error("unknown site id: " + id);
  }

  void validate() const {
    if (ids.empty()) throw validation_error("SiteSet: need at least one site");
    if (static_cast<std::size_t>(coords.rows()) != ids.size())
      throw validation_error("SiteSet: ids/coords size mismatch");
    std::unordered_set<std::string> seen;
    for (const auto& id : ids)
      if (!seen.insert(id).second)
        throw validation_error("DuplicateSiteId: " + id);
    if (!coords.allFinite()) throw validation_error("SiteSet: non-finite coordinate");
  }
};

// Row-major regular grid with ids g0, g1, ...
inline SiteSet make_grid(std::size_t nx, std::size_t ny, double step = 1.0) {
  if (nx == 0 || ny == 0) throw validation_error("make_grid: empty grid");
  SiteSet s;
  s.coords.resize(static_cast<Eigen::Index>(nx * ny), 2);
  std::size_t k = 0;
  for (std::size_t j = 0; j < ny; ++j)
    for (std::size_t i = 0; i < nx; ++i, ++k) {
      s.ids.push_back("g" + std::to_string(k));
      s.coords(static_cast<Eigen::Index>(k), 0) = static_cast<double>(i) * step;
      s.coords(static_cast<Eigen::Index>(k), 1) = static_cast<double>(j) * step;
    }
  s.validate();
  return s;
}

// Equirectangular lon/lat -> km projection about the mean latitude. Adequate
// for regional windows; the variogram argument stays in one unit.
inline void project_lonlat_to_km(SiteSet& sites) {
  constexpr double earth_radius_km = 6371.0;
  constexpr double deg = M_PI / 180.0;
  const double lat0 = sites.coords.col(1).mean() * deg;
  for (Eigen::Index i = 0; i < sites.coords.rows(); ++i) {
    const double lon = sites.coords(i, 0) * deg;
    const double lat = sites.coords(i, 1) * deg;
    sites.coords(i, 0) = earth_radius_km * std::cos(lat0) * lon;
    sites.coords(i, 1) = earth_radius_km * lat;
  }
}

inline Eigen::MatrixXd pairwise_distances(const SiteSet& sites) {
  sites.validate();
  const Eigen::Index d = sites.coords.rows();
  Eigen::MatrixXd dist = Eigen::MatrixXd::Zero(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = i + 1; j < d; ++j) {
      const double h = (sites.coords.row(i) - sites.coords.row(j)).norm();
      dist(i, j) = h;
      dist(j, i) = h;
    }
  return dist;
}

// n x D observations; rows are time replicates, columns follow SiteSet order.
// Missing values are NaN.
struct DataMatrix {
  Eigen::MatrixXd values;
  std::vector<std::string> site_ids;
  std::vector<std::string> time_labels;  // empty when input had no time column

  std::size_t rows() const { return static_cast<std::size_t>(values.rows()); }
  std::size_t cols() const { return static_cast<std::size_t>(values.cols()); }

  bool row_complete(std::size_t i) const {
    for (Eigen::Index j = 0; j < values.cols(); ++j)
      if (std::isnan(values(static_cast<Eigen::Index>(i), j))) return false;
    return true;
  }

  void validate() const {
    if (values.rows() < 1) throw validation_error("DataMatrix: no rows");
    for (Eigen::Index j = 0; j < values.cols(); ++j) {
      bool any = false;
      for (Eigen::Index i = 0; i < values.rows(); ++i)
        if (!std::isnan(values(i, j))) {
          any = true;
          break;
        }
      if (!any)
        throw validation_error("DataMatrix: column " + site_ids[static_cast<std::size_t>(j)] +
                               " entirely missing");
    }
  }
};

// CSV with header id,x,y
inline SiteSet load_sites(const std::string& path) {
  csv::Reader reader(path);
  std::vector<std::string> fields;
  if (!reader.next(fields)) throw parse_error("empty site file: " + path);
  if (fields.size() != 3 || fields[0] != "id" || fields[1] != "x" || fields[2] != "y")
    throw parse_error("site file header must be id,x,y", reader.line_no);

  SiteSet sites;
  std::vector<std::array<double, 2>> pts;
  while (reader.next(fields)) {
    if (fields.size() != 3)
      throw parse_error("expected 3 fields in site row", reader.line_no);
    sites.ids.push_back(fields[0]);
    pts.push_back({csv::parse_double(fields[1], reader.line_no),
                   csv::parse_double(fields[2], reader.line_no)});
  }
  sites.coords.resize(static_cast<Eigen::Index>(pts.size()), 2);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    sites.coords(static_cast<Eigen::Index>(i), 0) = pts[i][0];
    sites.coords(static_cast<Eigen::Index>(i), 1) = pts[i][1];
  }
  sites.validate();
  return sites;
}

inline void save_sites(const SiteSet& sites, const std::string& path,
                       const std::string& header_comment = "") {
  csv::Writer w(path);
  if (!header_comment.empty()) w.comment(header_comment);
  w.row({"id", "x", "y"});
  for (std::size_t i = 0; i < sites.size(); ++i)
    w.row({sites.ids[i], csv::format(sites.coords(static_cast<Eigen::Index>(i), 0)),
           csv::format(sites.coords(static_cast<Eigen::Index>(i), 1))});
}

// CSV whose header lists site ids, optionally preceded by a time column.
// Columns are reordered to SiteSet order; every site must be present.
inline DataMatrix load_data(const std::string& path, const SiteSet& sites) {
  csv::Reader reader(path);
  std::vector<std::string> fields;
  if (!reader.next(fields)) throw parse_error("empty data file: " + path);

  const bool has_time = !fields.empty() && fields[0] == "time";
  const std::size_t first_col = has_time ? 1 : 0;
  const std::size_t d = sites.size();
  if (fields.size() - first_col != d)
    throw validation_error("data file has " + std::to_string(fields.size() - first_col) +
                           " site columns, expected " + std::to_string(d));

  // map file columns onto SiteSet order
  std::vector<std::size_t> col_of_site(d);
  std::vector<bool> used(fields.size(), false);
  for (std::size_t s = 0; s < d; ++s) {
    bool found = false;
    for (std::size_t c = first_col; c < fields.size(); ++c) {
      if (!used[c] && fields[c] == sites.ids[s]) {
        col_of_site[s] = c;
        used[c] = true;
        found = true;
        break;
      }
    }
    if (!found) throw validation_error("data file missing column for site " + sites.ids[s]);
  }
  for (std::size_t c = first_col; c < fields.size(); ++c)
    if (!used[c]) throw validation_error("unknown column id in data file: " + fields[c]);

  DataMatrix data;
  data.site_ids = sites.ids;
  std::vector<std::vector<double>> rows;
  while (reader.next(fields)) {
    if (fields.size() != (has_time ? d + 1 : d))
      throw parse_error("wrong field count in data row", reader.line_no);
    if (has_time) data.time_labels.push_back(fields[0]);
    std::vector<double> row(d);
    for (std::size_t s = 0; s < d; ++s)
      row[s] = csv::parse_cell(fields[col_of_site[s]], reader.line_no);
    rows.push_back(std::move(row));
  }
  data.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < d; ++j)
      data.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  data.validate();
  return data;
}

inline void save_data(const DataMatrix& data, const std::string& path,
                      const std::string& header_comment = "") {
  csv::Writer w(path);
  if (!header_comment.empty()) w.comment(header_comment);
  const bool has_time = !data.time_labels.empty();
  std::vector<std::string> header;
  if (has_time) header.push_back("time");
  for (const auto& id : data.site_ids) header.push_back(id);
  w.row(header);
  for (std::size_t i = 0; i < data.rows(); ++i) {
    std::vector<std::string> row;
    if (has_time) row.push_back(data.time_labels[i]);
    for (std::size_t j = 0; j < data.cols(); ++j)
      row.push_back(csv::format(data.values(static_cast<Eigen::Index>(i),
                                            static_cast<Eigen::Index>(j))));
    w.row(row);
  }
}

}  // namespace rparp
