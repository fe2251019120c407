#pragma once

#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "ffp/common.hpp"
#include "ffp/projector.hpp"
#include "ffp/region.hpp"
#include "ffp/system.hpp"

namespace ffp {

using nlohmann::json;

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Matrices travel as row-major nested arrays of [re, im] pairs, so a reader
// without complex-number support can still consume them.
inline json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      row.push_back(json::array({m(r, c).real(), m(r, c).imag()}));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Matrix matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty() || !j[0].is_array())
    throw std::invalid_argument("matrix: expected a nonempty array of rows");
  Eigen::Index rows = static_cast<Eigen::Index>(j.size());
  Eigen::Index cols = static_cast<Eigen::Index>(j[0].size());
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
      throw std::invalid_argument("matrix: ragged rows");
    for (Eigen::Index c = 0; c < cols; ++c) {
      const json& e = row[static_cast<std::size_t>(c)];
      if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
        throw std::invalid_argument("matrix: entries must be [re, im] pairs");
      m(r, c) = Complex(e[0].get<double>(), e[1].get<double>());
    }
  }
  return m;
}

inline json vector_to_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i)
    out.push_back(json::array({v[i].real(), v[i].imag()}));
  return out;
}

inline Vector vector_from_json(const json& j) {
  if (!j.is_array() || j.empty())
    throw std::invalid_argument("vector: expected a nonempty array of [re, im] pairs");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    const json& e = j[i];
    if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
      throw std::invalid_argument("vector: entries must be [re, im] pairs");
    v[static_cast<Eigen::Index>(i)] = Complex(e[0].get<double>(), e[1].get<double>());
  }
  return v;
}

inline json region_to_json(const Region& r) {
  json sites = json::array();
  for (const Site& s : r.sites()) sites.push_back(s);
  return sites;
}

inline Region region_from_json(const json& j) {
  if (!j.is_array()) throw std::invalid_argument("region: expected an array of sites");
  std::vector<Site> sites;
  for (const json& e : j) {
    if (!e.is_array() || e.empty()) throw std::invalid_argument("region: sites are int arrays");
    sites.push_back(e.get<Site>());
  }
  return Region(std::move(sites));
}

inline json projector_to_json(const Projector& p) {
  return json{{"site_dim", p.site_dim},
              {"region", region_to_json(p.region)},
              {"matrix", matrix_to_json(p.mat)}};
}

inline Projector projector_from_json(const json& j) {
  if (!j.contains("site_dim") || !j.contains("region") || !j.contains("matrix"))
    throw std::invalid_argument("projector: needs site_dim, region, matrix");
  return Projector{matrix_from_json(j["matrix"]), region_from_json(j["region"]),
                   j["site_dim"].get<int>(), nullptr};
}

inline json ff_report_to_json(const FFReport& rep) {
  json residuals = json::array();
  for (const PairResidual& r : rep.residuals)
    residuals.push_back(json{
        {"pair", json::array({region_to_json(r.small), region_to_json(r.big)})},
        {"value", r.value}});
  return json{{"ok", rep.ok}, {"residuals", std::move(residuals)}, {"tol", rep.tol}};
}

// Compact window label for CSV cells and stable sorting: "[a..b)" for a
// contiguous one-dimensional window, the explicit site list otherwise.
// Deliberately comma-free so the labels sit safely in CSV columns.
inline std::string window_key(const Region& r) {
  const std::vector<Site>& sites = r.sites();
  bool interval = !sites.empty();
  for (const Site& s : sites) interval = interval && s.size() == 1;
  if (interval)
    for (std::size_t i = 1; i < sites.size(); ++i)
      interval = interval && sites[i][0] == sites[i - 1][0] + 1;
  std::ostringstream os;
  if (interval) {
    os << "[" << sites.front()[0] << ".." << sites.back()[0] + 1 << ")";
  } else {
    os << "{";
    for (const Site& s : sites) {
      os << "(";
      for (std::size_t i = 0; i < s.size(); ++i) os << (i ? " " : "") << s[i];
      os << ")";
    }
    os << "}";
  }
  return os.str();
}

inline std::string csv_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::string& header, bool timestamp) {
    out_.open(path);
    if (!out_) throw IoError("cannot open " + path + " for writing");
    if (timestamp) {
      std::time_t now = std::time(nullptr);
      char buf[32];
      std::tm tm_utc{};
      gmtime_r(&now, &tm_utc);
      std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
      out_ << "# generated " << buf << "\n";
    }
    out_ << header << "\n";
  }

  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
    out_ << "\n";
  }

 private:
  std::ofstream out_;
};

}  // namespace ffp
