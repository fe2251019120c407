#include <cstdio>
#include <exception>
#include <string>

#include "CLI11.hpp"

#include "ffp/cli.hpp"

namespace {

const char* kSchema =
    "Output files land in the directory given by --out (or the config's \"out\").\n"
    "Every analysis writes summary.json {analysis, ok, ...headline numbers} plus one CSV;\n"
    "--no-timestamp drops the leading '# generated <utc>' comment so reruns are\n"
    "byte-identical.  CSV columns:\n"
    "  verify-ff   window_small,window_big,residual        (+ report.json)\n"
    "  spectra     window,epsilon,min,gap,corank\n"
    "  ltqo        window_size,observable_id,norm,corank\n"
    "  boundary    n,ambient_size,boundary_dim,stabilized,trace_estimate,lower_bound\n"
    "  trace       n,value,lower_bound\n"
    "  hereditary  depth,window,residual\n"
    "Exit codes: 0 success, 1 verification failed, 2 bad request (config, analysis,\n"
    "fixture, dimension cap, file I/O).  Progress text goes to standard error.\n";

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{std::string("Frustration-free constraint family toolbox.\n\n") + kSchema};
  app.require_subcommand(0, 1);

  std::string config_path, analysis, out_dir;
  int jobs = 0;
  double tol = -1.0, boundary_tol = -1.0;
  bool no_timestamp = false;

  app.add_option("--config", config_path, "JSON run configuration file");
  app.add_option("--analysis", analysis,
                 "override the config's analysis (verify-ff, spectra, ltqo, boundary, trace, "
                 "hereditary)");
  app.add_option("--out", out_dir, "override the output directory");
  app.add_option("--jobs", jobs, "worker threads for the nesting check");
  app.add_option("--tol", tol, "override the verification tolerance");
  app.add_option("--boundary-tol", boundary_tol, "override the boundary residual tolerance");
  app.add_flag("--no-timestamp", no_timestamp, "omit the generation comment from CSV output");

  CLI::App* list = app.add_subcommand("list-fixtures", "print the bundled model families");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (list->parsed()) {
      std::fputs(ffp::list_fixtures_text().c_str(), stdout);
      return 0;
    }
    if (config_path.empty()) {
      std::fputs("a --config file is required (or use list-fixtures)\n", stderr);
      return 2;
    }
    ffp::RunConfig cfg = ffp::load_config(config_path);
    if (!analysis.empty()) cfg.analysis = analysis;
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (jobs > 0) cfg.jobs = jobs;
    if (tol >= 0) cfg.tol = tol;
    if (boundary_tol >= 0) cfg.boundary_tol = boundary_tol;
    bool known = false;
    for (const std::string& a : ffp::analysis_names()) known = known || a == cfg.analysis;
    if (!known) throw ffp::ConfigError("unknown analysis '" + cfg.analysis + "'");

    ffp::RunResult res = ffp::run_analysis(cfg, !no_timestamp);
    std::fprintf(stderr, "%s: %s (results in %s)\n", cfg.analysis.c_str(),
                 res.summary.value("ok", false) ? "ok" : "FAILED", cfg.out_dir.c_str());
    return res.exit_code;
  } catch (const ffp::ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const ffp::IoError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::domain_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "failed: %s\n", e.what());
    return 1;
  }
}
