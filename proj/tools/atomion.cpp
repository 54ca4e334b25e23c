// atomion: command-line frontend for sweeps, verification and the eigenstate cache.
#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "atomion/cache.hpp"
#include "atomion/run.hpp"
#include "atomion/verify.hpp"

using namespace atomion;

namespace {

struct Globals {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string output;
  std::string cache_root;
  std::size_t threads = 0;
  bool recompute = false;
  bool quiet = false;
};

RunConfig build_config(const Globals& gl) {
  nlohmann::json j;
  if (!gl.config_path.empty()) {
    std::ifstream in(gl.config_path);
    if (!in) throw ConfigError("", "cannot open config file " + gl.config_path);
    std::stringstream ss;
    ss << in.rdbuf();
    j = parse_config_text(ss.str(), gl.config_path);
  } else {
    j = to_json(default_config());
  }
  for (const auto& o : gl.overrides) apply_override(j, o);
  RunConfig c = config_from_json(j);
  if (!gl.output.empty()) c.output = gl.output;
  if (!gl.cache_root.empty()) c.cache_root = gl.cache_root;
  if (c.cache_root.empty()) c.cache_root = default_cache_root();
  if (gl.threads > 0) c.solver.threads = gl.threads;
  if (gl.recompute) c.cache = CachePolicy::recompute;
  validate(c);
  return c;
}

int report_run(const RunReport& r) {
  std::cout << "points " << r.points.size() << ", solves " << r.solves << ", cache hits " << r.cache_hits
            << ", failures " << r.failures << '\n';
  for (const auto& f : r.files) std::cout << "  " << f.name << "  " << f.rows << " rows  " << f.sha256 << '\n';
  return r.exit_code();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact few-body solver for two bosonic atoms and a trapped ion"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  Globals gl;
  app.add_option("-c,--config", gl.config_path, "JSON config file")->check(CLI::ExistingFile);
  app.add_option("-s,--set", gl.overrides, "Override a config field, e.g. sweep.g=[0,1] (repeatable)");
  app.add_option("-o,--output", gl.output, "Output directory");
  app.add_option("--cache-root", gl.cache_root, "Eigenstate cache directory (default $ATOMION_CACHE or .atomion-cache)");
  app.add_option("-j,--threads", gl.threads, "Worker threads");
  app.add_flag("--recompute", gl.recompute, "Ignore cached eigenstates");
  app.add_flag("-q,--quiet", gl.quiet, "No progress log");

  auto* solve = app.add_subcommand("solve", "Solve every sweep point and write spectrum.csv");
  auto* observables = app.add_subcommand("observables", "Compute the configured observables, reusing cached states");
  auto* sweep = app.add_subcommand("sweep", "Solve and compute the configured observables");
  auto* verify_cmd = app.add_subcommand("verify", "Run the built-in oracle checks");
  std::vector<std::string> checks;
  verify_cmd->add_option("--check", checks, "Run only the named check (repeatable)")
      ->check(CLI::IsMember(verify_check_names()));
  auto* cache = app.add_subcommand("cache", "Inspect or clear the eigenstate cache");
  cache->require_subcommand(1);
  auto* ls = cache->add_subcommand("ls", "List cached eigenstates");
  auto* rm = cache->add_subcommand("rm", "Remove cached eigenstates by hash prefix");
  std::string prefix;
  bool all = false;
  rm->add_option("prefix", prefix, "Hash prefix");
  rm->add_flag("--all", all, "Remove every entry");

  CLI11_PARSE(app, argc, argv);

  RunConfig cfg;
  try {
    cfg = build_config(gl);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  }
  std::ostream* log = gl.quiet ? nullptr : &std::cerr;

  try {
    if (*solve) {
      cfg.emit = {Emit::spectrum};
      return report_run(run(cfg, log));
    }
    if (*observables) {
      cfg.cache = CachePolicy::reuse;
      return report_run(run(cfg, log));
    }
    if (*sweep) return report_run(run(cfg, log));
    if (*verify_cmd) {
      const auto r = verify(cfg, &std::cout, checks);
      std::size_t failed = 0;
      for (const auto& c : r.checks) failed += !c.passed;
      std::cout << (r.ok() ? "all checks passed" : std::to_string(failed) + " check(s) failed") << '\n';
      return r.ok() ? 0 : 1;
    }
    if (*ls) {
      for (const auto& e : EigenCache(cfg.cache_root).list())
        std::cout << e.hash.substr(0, 16) << "  " << to_string(e.frame) << "  beta=" << e.beta << "  g=" << e.g
                  << "  states=" << e.states << "  " << e.bytes << " B\n";
      return 0;
    }
    if (*rm) {
      if (prefix.empty() && !all) {
        std::cerr << "cache rm: give a hash prefix or --all\n";
        return 2;
      }
      std::cout << "removed " << EigenCache(cfg.cache_root).remove(all ? "" : prefix) << " entries\n";
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
