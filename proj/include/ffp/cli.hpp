#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ffp/boundary.hpp"
#include "ffp/fixtures.hpp"
#include "ffp/hamiltonian.hpp"
#include "ffp/io.hpp"
#include "ffp/models.hpp"
#include "ffp/states.hpp"
#include "ffp/system.hpp"

namespace ffp {

// Anything wrong with the request itself (as opposed to the mathematics it
// asks about): unreadable or malformed config, unknown analysis or fixture,
// parameters that exceed the dense-dimension cap.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  json model;
  std::string analysis;
  double tol = default_tol;
  double boundary_tol = boundary_default_tol;
  int ladder_min = 0;  // 0: smallest available window
  int ladder_max = 0;  // 0: everything the model provides
  int depth = 0;       // hereditary: corners to compare against; 0 = full chain
  int jobs = 1;
  std::string out_dir = ".";
};

inline const std::vector<std::string>& analysis_names() {
  static const std::vector<std::string> names{"verify-ff", "spectra",  "ltqo",
                                              "boundary",  "trace",    "hereditary"};
  return names;
}

namespace detail {

inline void expect_keys(const json& j, const std::set<std::string>& allowed, const char* where) {
  for (const auto& item : j.items())
    if (!allowed.count(item.key()))
      throw ConfigError(std::string(where) + ": unknown key '" + item.key() + "'");
}

inline int int_field(const json& j, const char* key, int fallback, const char* where) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number_integer())
    throw ConfigError(std::string(where) + ": '" + key + "' must be an integer");
  return j[key].get<int>();
}

inline double num_field(const json& j, const char* key, double fallback, const char* where) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number())
    throw ConfigError(std::string(where) + ": '" + key + "' must be a number");
  return j[key].get<double>();
}

inline Site extent_field(const json& j, const char* where) {
  if (!j.contains("extent") || !j["extent"].is_array() || j["extent"].empty())
    throw ConfigError(std::string(where) + ": 'extent' must be a nonempty int array");
  Site ext;
  for (const json& e : j["extent"]) {
    if (!e.is_number_integer() || e.get<int>() < 1)
      throw ConfigError(std::string(where) + ": extent entries must be positive");
    ext.push_back(e.get<int>());
  }
  return ext;
}

}  // namespace detail

inline FFSystem build_model(const json& model) {
  if (!model.is_object() || !model.contains("kind") || !model["kind"].is_string())
    throw ConfigError("model: an object with a string 'kind' is required");
  std::string kind = model["kind"].get<std::string>();
  try {
    if (kind == "fixture") {
      detail::expect_keys(model, {"kind", "name", "length", "extent", "seed"}, "model");
      if (!model.contains("name") || !model["name"].is_string())
        throw ConfigError("model: fixture needs a string 'name'");
      std::string name = model["name"].get<std::string>();
      int length = detail::int_field(model, "length", 4, "model");
      if (length < 1) throw ConfigError("model: 'length' must be positive");
      auto seed = static_cast<std::uint64_t>(detail::int_field(model, "seed", 0, "model"));
      if (name == "product") return product_fixture(length);
      if (name == "two-product-meet") return two_product_meet(length);
      if (name == "aklt") return mps_system(length, aklt_spec());
      if (name == "random-chain-vbs")
        return vbs_system(Site{length}, random_chain_vbs(seed ? seed : 11));
      if (name == "ghz-grid-vbs") {
        Site ext = model.contains("extent") ? detail::extent_field(model, "model") : Site{2, 2};
        if (ext.size() != 2) throw ConfigError("model: ghz-grid-vbs needs a 2d extent");
        return vbs_system(ext, ghz_grid_vbs());
      }
      if (name == "frustrated-random") return frustrated_random_system(seed ? seed : 5);
      throw ConfigError("model: unknown fixture '" + name + "'");
    }
    if (kind == "product") {
      detail::expect_keys(model, {"kind", "site_dim", "psi", "extent"}, "model");
      int d = detail::int_field(model, "site_dim", 0, "model");
      if (d < 1) throw ConfigError("model: product needs 'site_dim' >= 1");
      if (!model.contains("psi")) throw ConfigError("model: product needs 'psi'");
      Vector psi = vector_from_json(model["psi"]);
      if (psi.size() != d) throw ConfigError("model: 'psi' length must equal site_dim");
      return product_system(psi, detail::extent_field(model, "model"));
    }
    if (kind == "vbs") {
      detail::expect_keys(model,
                          {"kind", "site_dim", "generators", "index_sizes", "psi", "gamma",
                           "extent"},
                          "model");
      VbsSpec spec;
      spec.site_dim = detail::int_field(model, "site_dim", 0, "model");
      if (!model.contains("generators") || !model["generators"].is_array())
        throw ConfigError("model: vbs needs 'generators' (array of sites)");
      for (const json& g : model["generators"]) spec.generators.push_back(g.get<Site>());
      if (!model.contains("index_sizes") || !model["index_sizes"].is_array())
        throw ConfigError("model: vbs needs 'index_sizes'");
      spec.index_sizes = model["index_sizes"].get<std::vector<int>>();
      if (!model.contains("psi") || !model.contains("gamma"))
        throw ConfigError("model: vbs needs 'psi' and 'gamma'");
      spec.psi = matrix_from_json(model["psi"]);
      spec.gamma = vector_from_json(model["gamma"]);
      return vbs_system(detail::extent_field(model, "model"), spec);
    }
    if (kind == "mps") {
      detail::expect_keys(model, {"kind", "site_dim", "bond_dim", "tensors", "rho", "length"},
                          "model");
      MpsSpec spec;
      spec.site_dim = detail::int_field(model, "site_dim", 0, "model");
      spec.bond_dim = detail::int_field(model, "bond_dim", 0, "model");
      if (!model.contains("tensors") || !model["tensors"].is_array())
        throw ConfigError("model: mps needs 'tensors' (one matrix per basis state)");
      for (const json& t : model["tensors"]) spec.v.push_back(matrix_from_json(t));
      spec.rho = model.contains("rho") ? matrix_from_json(model["rho"])
                                       : dual_transfer_fixed_point(spec.bond_dim, spec.v);
      int length = detail::int_field(model, "length", 0, "model");
      if (length < 1) throw ConfigError("model: mps needs 'length' >= 1");
      return mps_system(length, spec);
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("model: ") + e.what());
  }
  throw ConfigError("model: unknown kind '" + kind + "'");
}

// Config fragment that rebuilds the named fixture.  Spelled inline where the
// declarative format can express the model, so serialization really carries
// the matrices; composite fixtures stay by-name.
inline json fixture_config(const std::string& name) {
  if (name == "product") {
    Vector e0 = Vector::Zero(2);
    e0[0] = 1.0;
    return json{{"kind", "product"}, {"site_dim", 2}, {"psi", vector_to_json(e0)},
                {"extent", json::array({4})}};
  }
  if (name == "two-product-meet")
    return json{{"kind", "fixture"}, {"name", "two-product-meet"}, {"length", 4}};
  if (name == "aklt") {
    MpsSpec spec = aklt_spec();
    json tensors = json::array();
    for (const Matrix& v : spec.v) tensors.push_back(matrix_to_json(v));
    return json{{"kind", "mps"},     {"site_dim", spec.site_dim},
                {"bond_dim", spec.bond_dim}, {"tensors", std::move(tensors)},
                {"rho", matrix_to_json(spec.rho)}, {"length", 4}};
  }
  if (name == "random-chain-vbs") {
    VbsSpec spec = random_chain_vbs();
    json gens = json::array();
    for (const Site& g : spec.generators) gens.push_back(g);
    return json{{"kind", "vbs"},
                {"site_dim", spec.site_dim},
                {"generators", std::move(gens)},
                {"index_sizes", spec.index_sizes},
                {"psi", matrix_to_json(spec.psi)},
                {"gamma", vector_to_json(spec.gamma)},
                {"extent", json::array({4})}};
  }
  if (name == "ghz-grid-vbs") {
    VbsSpec spec = ghz_grid_vbs();
    json gens = json::array();
    for (const Site& g : spec.generators) gens.push_back(g);
    return json{{"kind", "vbs"},
                {"site_dim", spec.site_dim},
                {"generators", std::move(gens)},
                {"index_sizes", spec.index_sizes},
                {"psi", matrix_to_json(spec.psi)},
                {"gamma", vector_to_json(spec.gamma)},
                {"extent", json::array({2, 2})}};
  }
  if (name == "frustrated-random")
    return json{{"kind", "fixture"}, {"name", "frustrated-random"}, {"seed", 5}};
  throw ConfigError("unknown fixture '" + name + "'");
}

inline RunConfig parse_config(const json& j) {
  if (!j.is_object()) throw ConfigError("config: top level must be an object");
  detail::expect_keys(j,
                      {"model", "analysis", "tol", "boundary_tol", "ladder", "depth", "jobs",
                       "out"},
                      "config");
  RunConfig cfg;
  if (!j.contains("model")) throw ConfigError("config: 'model' is required");
  cfg.model = j["model"];
  if (!j.contains("analysis") || !j["analysis"].is_string())
    throw ConfigError("config: a string 'analysis' is required");
  cfg.analysis = j["analysis"].get<std::string>();
  cfg.tol = detail::num_field(j, "tol", default_tol, "config");
  cfg.boundary_tol = detail::num_field(j, "boundary_tol", boundary_default_tol, "config");
  if (cfg.tol < 0 || cfg.boundary_tol < 0) throw ConfigError("config: tolerances must be >= 0");
  if (j.contains("ladder")) {
    const json& l = j["ladder"];
    if (!l.is_object()) throw ConfigError("config: 'ladder' must be an object");
    detail::expect_keys(l, {"min", "max"}, "config.ladder");
    cfg.ladder_min = detail::int_field(l, "min", 0, "config.ladder");
    cfg.ladder_max = detail::int_field(l, "max", 0, "config.ladder");
    if (cfg.ladder_min < 0 || cfg.ladder_max < 0)
      throw ConfigError("config.ladder: bounds must be >= 0");
    if (cfg.ladder_max && cfg.ladder_min > cfg.ladder_max)
      throw ConfigError("config.ladder: min exceeds max");
  }
  cfg.depth = detail::int_field(j, "depth", 0, "config");
  cfg.jobs = detail::int_field(j, "jobs", 1, "config");
  if (cfg.depth < 0 || cfg.jobs < 1) throw ConfigError("config: bad 'depth' or 'jobs'");
  if (j.contains("out")) {
    if (!j["out"].is_string()) throw ConfigError("config: 'out' must be a string");
    cfg.out_dir = j["out"].get<std::string>();
  }
  bool known = false;
  for (const std::string& a : analysis_names()) known = known || a == cfg.analysis;
  if (!known) throw ConfigError("config: unknown analysis '" + cfg.analysis + "'");
  return cfg;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config " + path + ": " + e.what());
  }
  return parse_config(j);
}

namespace detail {

// Nested anchored boxes [0,c_1)×…, growing one coordinate at a time, kept when
// the system stores them.  For chains this is the familiar [0,n) ladder.
inline std::vector<Region> anchored_ladder(const FFSystem& sys, int nmin, int nmax) {
  if (sys.windows.empty()) throw ConfigError("model stores no windows");
  std::size_t width = sys.windows[0].sites()[0].size();
  Site ext(width, 1);
  for (const Region& w : sys.windows)
    for (const Site& s : w.sites())
      for (std::size_t k = 0; k < width; ++k) ext[k] = std::max(ext[k], s[k] + 1);
  std::vector<Site> corners;
  Site cur(width, 1);
  corners.push_back(cur);
  for (std::size_t k = 0; k < width; ++k)
    while (cur[k] < ext[k]) {
      ++cur[k];
      corners.push_back(cur);
    }
  std::vector<Region> out;
  for (const Site& c : corners) {
    Region r = Region::box(Site(width, 0), c);
    int n = static_cast<int>(r.size());
    if (nmin && n < nmin) continue;
    if (nmax && n > nmax) continue;
    if (sys.has(r)) out.push_back(std::move(r));
  }
  if (out.empty()) throw ConfigError("no anchored windows in the requested ladder range");
  return out;
}

inline int chain_extent(const FFSystem& sys, const char* analysis) {
  for (const Region& w : sys.windows)
    for (const Site& s : w.sites())
      if (s.size() != 1)
        throw ConfigError(std::string(analysis) + ": this analysis needs a one-dimensional chain");
  int n = 0;
  for (const Region& w : sys.windows)
    for (const Site& s : w.sites()) n = std::max(n, s[0] + 1);
  return n;
}

// Largest nested chain of stored interval windows around a center site,
// smallest first; ties resolved by lexicographic window order.
inline std::vector<Region> centered_ladder(const FFSystem& sys, int center, int nmin, int nmax) {
  std::vector<Region> candidates;
  for (const Region& w : sys.windows) {
    bool hit = false;
    for (const Site& s : w.sites()) hit = hit || s[0] == center;
    int n = static_cast<int>(w.size());
    if (hit && !(nmin && n < nmin) && !(nmax && n > nmax)) candidates.push_back(w);
  }
  std::sort(candidates.begin(), candidates.end(), [](const Region& a, const Region& b) {
    return a.size() != b.size() ? a.size() < b.size() : a < b;
  });
  std::vector<Region> out;
  for (Region& w : candidates)
    if (out.empty() || w.contains(out.back())) out.push_back(std::move(w));
  if (out.empty()) throw ConfigError("ltqo: no stored window covers the center site");
  return out;
}

// Traceless Hermitian single-site probes: neighbouring-level population
// differences plus the real and imaginary couplings of the first two levels.
inline std::vector<std::pair<std::string, Matrix>> probe_set(int d) {
  std::vector<std::pair<std::string, Matrix>> out;
  for (int k = 0; k + 1 < d; ++k) {
    Matrix m = Matrix::Zero(d, d);
    m(k, k) = 1.0;
    m(k + 1, k + 1) = -1.0;
    out.emplace_back("z" + std::to_string(k) + std::to_string(k + 1), std::move(m));
  }
  if (d >= 2) {
    Matrix x = Matrix::Zero(d, d), y = Matrix::Zero(d, d);
    x(0, 1) = x(1, 0) = 1.0;
    y(0, 1) = Complex(0, -1);
    y(1, 0) = Complex(0, 1);
    out.emplace_back("x01", std::move(x));
    out.emplace_back("y01", std::move(y));
  }
  return out;
}

}  // namespace detail

struct RunResult {
  int exit_code = 0;
  json summary;
};

inline RunResult run_analysis(const RunConfig& cfg, bool timestamp = true) {
  FFSystem sys = build_model(cfg.model);
  std::filesystem::path out(cfg.out_dir);
  std::error_code ec;
  std::filesystem::create_directories(out, ec);
  if (ec) throw ConfigError("cannot create output directory " + cfg.out_dir);
  auto csv_path = [&](const char* stem) { return (out / (std::string(stem) + ".csv")).string(); };
  RunResult res;
  json& summary = res.summary;
  summary["analysis"] = cfg.analysis;

  if (cfg.analysis == "verify-ff") {
    FFReport rep = check_ff(sys, cfg.tol, cfg.jobs);
    CsvWriter csv(csv_path("verify-ff"), "window_small,window_big,residual", timestamp);
    for (const PairResidual& r : rep.residuals)
      csv.row({window_key(r.small), window_key(r.big), csv_num(r.value)});
    std::ofstream rp(out / "report.json");
    rp << ff_report_to_json(rep).dump(2) << "\n";
    summary["ok"] = rep.ok;
    summary["pairs"] = rep.residuals.size();
    summary["worst_residual"] = rep.worst;
    summary["tol"] = rep.tol;
    res.exit_code = rep.ok ? 0 : 1;
  } else if (cfg.analysis == "spectra") {
    Region delta = sys.windows[0];
    for (const Region& w : sys.windows)
      if (w.size() < delta.size() || (w.size() == delta.size() && w < delta)) delta = w;
    const Projector& pd = sys.at(delta);
    Interaction q = make_interaction(LocalOperator{pd.mat, pd.region, pd.site_dim});
    std::vector<Region> windows;
    for (const Region& w : sys.windows) {
      int n = static_cast<int>(w.size());
      if (enumerate_translates(delta, w).empty()) continue;
      if ((cfg.ladder_min && n < cfg.ladder_min) || (cfg.ladder_max && n > cfg.ladder_max))
        continue;
      windows.push_back(w);
    }
    std::sort(windows.begin(), windows.end(), [](const Region& a, const Region& b) {
      return a.size() != b.size() ? a.size() < b.size() : a < b;
    });
    CsvWriter csv(csv_path("spectra"), "window,epsilon,min,gap,corank", timestamp);
    bool ok = true;
    double worst_eps = 0.0, min_gap = std::numeric_limits<double>::infinity();
    for (const Region& w : windows) {
      Hamiltonian h = assemble(q, w);
      Eigen::Index zeros = supporting_projection(h).corank();
      double gap = spectral_gap(h);
      worst_eps = std::max(worst_eps, h.epsilon);
      min_gap = std::min(min_gap, gap);
      ok = ok && std::abs(h.epsilon) <= cfg.tol;
      csv.row({window_key(w), csv_num(h.epsilon), csv_num(h.spectrum.size() ? h.spectrum[0] : 0.0),
               csv_num(gap), std::to_string(zeros)});
    }
    summary["ok"] = ok;
    summary["base_window"] = window_key(delta);
    summary["windows"] = windows.size();
    summary["worst_epsilon"] = worst_eps;
    summary["min_gap"] = min_gap;
  } else if (cfg.analysis == "ltqo") {
    int n = detail::chain_extent(sys, "ltqo");
    int center = n / 2;
    std::vector<Region> ladder =
        detail::centered_ladder(sys, center, cfg.ladder_min, cfg.ladder_max);
    std::vector<std::pair<std::string, Matrix>> probes = detail::probe_set(sys.site_dim);
    std::vector<LocalOperator> obs;
    for (const auto& [id, m] : probes)
      obs.push_back(make_local(m, Region::interval(center, center + 1), sys.site_dim));
    LtqoScan scan = ltqo_scan(sys, obs, ladder);
    CsvWriter csv(csv_path("ltqo"), "window_size,observable_id,norm,corank", timestamp);
    for (const LtqoRow& row : scan.rows)
      for (std::size_t k = 0; k < probes.size(); ++k)
        csv.row({std::to_string(row.window.size()), probes[k].first, csv_num(row.norms[k]),
                 std::to_string(row.corank)});
    summary["ok"] = true;
    summary["center"] = center;
    summary["windows"] = scan.rows.size();
    summary["unique_indicator"] = scan.unique_indicator;
    json final_norms = json::object();
    if (!scan.rows.empty())
      for (std::size_t k = 0; k < probes.size(); ++k)
        final_norms[probes[k].first] = scan.rows.back().norms[k];
    summary["final_norms"] = std::move(final_norms);
  } else if (cfg.analysis == "boundary") {
    int n = detail::chain_extent(sys, "boundary");
    std::vector<BoundaryRung> rungs;
    for (int m = 1; m + 2 <= n; ++m) {
      if ((cfg.ladder_min && m < cfg.ladder_min) || (cfg.ladder_max && m > cfg.ladder_max))
        continue;
      Region lam = Region::interval(0, m), gam = Region::interval(0, m + 2);
      if (sys.has(lam) && sys.has(gam)) rungs.push_back({std::move(lam), std::move(gam)});
    }
    if (rungs.empty()) throw ConfigError("boundary: no (window, window+2) pairs are stored");
    BoundaryScan scan = boundary_dim_scan(sys, rungs, cfg.boundary_tol);
    std::vector<Region> trace_ladder;
    for (const BoundaryRung& r : rungs) trace_ladder.push_back(r.window);
    std::vector<TraceEstimateRow> traces = cuntz_trace_estimate(sys, trace_ladder);
    CsvWriter csv(csv_path("boundary"),
                  "n,ambient_size,boundary_dim,stabilized,trace_estimate,lower_bound", timestamp);
    for (std::size_t i = 0; i < scan.rows.size(); ++i) {
      const BoundaryScanRow& row = scan.rows[i];
      csv.row({std::to_string(row.window.size()), std::to_string(row.ambient.size()),
               std::to_string(row.dimension), row.stabilized ? "1" : "0",
               csv_num(traces[i].value), csv_num(traces[i].lower_bound)});
    }
    summary["ok"] = scan.stabilized;
    summary["rungs"] = scan.rows.size();
    summary["final_dim"] = scan.rows.back().dimension;
    summary["stabilized"] = scan.stabilized;
    summary["final_trace"] = traces.back().value;
    summary["tol"] = scan.tol;
  } else if (cfg.analysis == "trace") {
    std::vector<Region> ladder = detail::anchored_ladder(sys, cfg.ladder_min, cfg.ladder_max);
    std::vector<TraceEstimateRow> rows = cuntz_trace_estimate(sys, ladder);
    CsvWriter csv(csv_path("trace"), "n,value,lower_bound", timestamp);
    for (const TraceEstimateRow& r : rows)
      csv.row({std::to_string(r.window.size()), csv_num(r.value), csv_num(r.lower_bound)});
    summary["ok"] = true;
    summary["windows"] = rows.size();
    summary["final_value"] = rows.back().value;
  } else if (cfg.analysis == "hereditary") {
    std::vector<Region> ladder = detail::anchored_ladder(sys, cfg.ladder_min, cfg.ladder_max);
    WindowState omega = restrict_state(kernel_mixture(sys), ladder);
    HereditaryTruncation t = localized_unit(omega, cfg.tol > 0 ? cfg.tol : default_tol);
    std::size_t depth = cfg.depth ? std::min<std::size_t>(cfg.depth, t.ladder.size())
                                  : t.ladder.size();
    CsvWriter csv(csv_path("hereditary"), "depth,window,residual", timestamp);
    double final_residual = 0.0;
    for (std::size_t m = 1; m <= depth; ++m) {
      final_residual = property_f_residual(t, m);
      csv.row({std::to_string(m), window_key(t.ladder[m - 1]), csv_num(final_residual)});
    }
    double pass_tol = std::max(cfg.tol, 1e-8);
    bool ok = t.monotone.ok && final_residual <= pass_tol;
    summary["ok"] = ok;
    summary["monotone"] = t.monotone.ok;
    summary["monotone_worst"] = t.monotone.worst;
    summary["depth"] = depth;
    summary["final_residual"] = final_residual;
    res.exit_code = ok ? 0 : 1;
  } else {
    throw ConfigError("unknown analysis '" + cfg.analysis + "'");
  }

  std::ofstream sf(out / "summary.json");
  if (!sf) throw ConfigError("cannot write summary in " + cfg.out_dir);
  sf << summary.dump(2) << "\n";
  return res;
}

inline std::string list_fixtures_text() {
  std::ostringstream os;
  for (const FixtureInfo& f : fixture_registry()) os << f.name << "\t" << f.summary << "\n";
  return os.str();
}

}  // namespace ffp
