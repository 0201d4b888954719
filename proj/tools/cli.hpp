#pragma once

// The `integrals` command line: parsing, dispatch and report printing.
// run_cli() is separate from main() so tests can drive it with string
// streams.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "integrals/integrals.hpp"

namespace integrals::cli {

enum ExitCode : int { ok = 0, error = 1, inconclusive = 2 };

struct RunConfig {
  Limits limits;
  std::string cache_dir;  // empty: environment, then the default
  bool no_cache = false;
  bool machine = false;
  std::uint64_t seed = 1;

  void validate() const {
    if (limits.enumeration_threshold == 0 || limits.aut_gate == 0 || limits.lattice_gate == 0 || limits.ball_cap == 0 ||
        limits.table_threshold == 0 || limits.assignment_cap == 0 || limits.catalog_bound == 0)
      throw PreconditionError("gates must be positive");
    if (limits.workers == 0) throw PreconditionError("worker count must be positive");
  }

  CatalogStore store() const {
    if (no_cache) return CatalogStore(limits);
    return CatalogStore(limits, default_cache_dir(cache_dir));
  }
};

inline std::string read_text_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("cannot read " + path);
  return {std::istreambuf_iterator<char>(f), {}};
}

/// A group given as a file path (group file), inline generators in cycle
/// notation separated by ';' (degree = largest point), or a descriptor.
inline PermGroup resolve_group(const std::string& input, const Limits& limits) {
  std::error_code ec;
  if (std::filesystem::is_regular_file(input, ec)) return parse_group(read_text_file(input));
  const auto first = input.find_first_not_of(" \t");
  if (first != std::string::npos && input[first] == '(') {
    std::size_t deg = 1, cur = 0;
    for (char c : input) {
      if (std::isdigit(static_cast<unsigned char>(c))) {
        cur = cur * 10 + static_cast<std::size_t>(c - '0');
        if (cur > (1u << 20)) throw ParseError("point too large", 1, 1);
        deg = std::max(deg, cur);
      } else {
        cur = 0;
      }
    }
    std::vector<Permutation> gens;
    std::size_t start = 0;
    while (start <= input.size()) {
      std::size_t end = input.find(';', start);
      if (end == std::string::npos) end = input.size();
      gens.push_back(parse_permutation(std::string_view(input).substr(start, end - start), deg, 1, start + 1));
      start = end + 1;
    }
    return PermGroup(deg, gens);
  }
  return construct(input, limits);
}

inline std::string join_orders(const std::vector<PermGroup>& gs) {
  std::string s;
  for (std::size_t i = 0; i < gs.size(); ++i) s += (i ? "," : "") + gs[i].order().str();
  return s;
}

inline int cmd_analyze(const RunConfig& cfg, const std::string& input, std::ostream& out) {
  const Limits& l = cfg.limits;
  const PermGroup g = resolve_group(input, l);
  const auto series = derived_series(g);
  const PermGroup z = centre(g, l);
  const AbelianType ab = abelianization(g);
  const auto cls = nilpotency_class(g);
  const Fingerprint f = fingerprint(g, l);
  const Fingerprint fd = fingerprint(series.size() > 1 ? series[1] : g, l);
  if (cfg.machine) {
    out << "analyze-report v1\n";
    out << "input=" << input << "\n";
    out << "degree=" << g.degree() << "\n";
    out << "order=" << g.order() << "\n";
    out << "centre.order=" << z.order() << "\n";
    out << "derived.series=" << join_orders(series) << "\n";
    out << "abelianization=" << ab.to_string() << "\n";
    out << "class=" << (cls ? std::to_string(*cls) : std::string("none")) << "\n";
    out << "fingerprint=" << f.to_string() << "\n";
    out << "derived.fingerprint=" << fd.to_string() << "\n";
  } else {
    out << "group " << input << " (degree " << g.degree() << ")\n";
    out << "order: " << g.order() << "\n";
    out << "centre order: " << z.order() << "\n";
    out << "derived series orders: " << join_orders(series) << "\n";
    out << "abelian invariants of G/G': " << ab.to_string() << "\n";
    out << "nilpotency class: " << (cls ? std::to_string(*cls) : std::string("not nilpotent")) << "\n";
    out << "fingerprint: " << f.to_string() << "\n";
    out << "derived subgroup fingerprint: " << fd.to_string() << "\n";
  }
  return ok;
}

inline int cmd_integrate(const RunConfig& cfg, const std::string& target, std::uint64_t bound,
                         std::optional<std::uint64_t> p, const std::string& verify_file, std::ostream& out) {
  if (!verify_file.empty()) {
    const std::size_t n = reverify_report(read_text_file(verify_file), cfg.limits);
    out << (cfg.machine ? "verified=" : "verified findings: ") << n << "\n";
    return ok;
  }
  if (target.empty()) throw PreconditionError("integrate needs --target or --verify");
  if (p && !detail::is_prime(*p)) throw PreconditionError("--p must be a prime");
  const PermGroup g = resolve_group(target, cfg.limits);
  CatalogStore store = cfg.store();
  const IntegralReport r = search_integral(g, bound, p, store, target);
  out << (cfg.machine ? format_report(r) : summarize_report(r));
  return r.verdict == Verdict::none_within_bound ? inconclusive : ok;
}

inline int cmd_enum(const RunConfig& cfg, std::uint64_t order, const std::string& out_file, std::ostream& out) {
  CatalogStore store = cfg.store();
  const Catalog& c = store.get(order);
  if (!out_file.empty()) save_catalog(c, out_file);
  if (cfg.machine) {
    out << "enum-report v1\norder=" << order << "\ncount=" << c.entries.size() << "\n";
    for (std::size_t i = 0; i < c.entries.size(); ++i) out << "entry." << i << ".fingerprint=" << c.fingerprints[i].to_string() << "\n";
  } else {
    out << c.entries.size() << " groups of order " << order << "\n";
    for (std::size_t i = 0; i < c.entries.size(); ++i) out << "  " << i << ": " << c.fingerprints[i].to_string() << "\n";
  }
  if (!out_file.empty() && !cfg.machine) out << "written to " << out_file << "\n";
  for (const auto& w : store.warnings()) out << (cfg.machine ? "warning=" : "warning: ") << w << "\n";
  return ok;
}

struct GaugeArgs {
  std::string preset = "metabelian";
  std::size_t n = 1;
  std::optional<std::size_t> M, N;
  std::string group;
  std::size_t k = 1;
};

inline int cmd_gauge(const RunConfig& cfg, const GaugeArgs& a, std::ostream& out) {
  const IdentitySet ids = IdentitySet::preset(a.preset);
  if (!a.group.empty()) {
    const PermGroup g = resolve_group(a.group, cfg.limits);
    const auto s = symmetrize(g.generators());
    const Ball b = ball(g, s, a.k, cfg.limits);
    const LawCheck c = holds_on_set(ids, b.elements, cfg.limits);
    out << "gauge-report v1\n";
    out << "group=" << a.group << "\npreset=" << ids.name << "\nradius=" << a.k << "\nball.size=" << b.size() << "\n";
    out << "holds=" << (c.holds ? "yes" : "no") << "\n";
    if (c.witness) {
      out << "witness.law=" << ids.laws[c.witness->law].to_string() << "\n";
      for (std::size_t i = 0; i < c.witness->assignment.size(); ++i)
        out << "witness." << Word::variable_name(static_cast<std::uint32_t>(i)) << "="
            << c.witness->assignment[i].to_string() << "\n";
    }
    return ok;
  }
  if (a.preset != "metabelian") throw PreconditionError("preset " + a.preset + " needs --group");
  const std::size_t M = a.M.value_or(4 * a.n + 2);
  out << format_wreath_experiment(metabelian_wreath_experiment(a.n, M, a.N, cfg.limits, 4000, cfg.seed));
  return ok;
}

inline int cmd_tower(const RunConfig& cfg, const std::vector<std::string>& files, std::ostream& out) {
  if (files.empty() || files.size() > 2) throw PreconditionError("tower takes one file (show) or two (G-system, K-system)");
  const InverseSystem g = parse_tower(read_text_file(files[0]));
  out << "tower-report v1\nlevels=" << g.size() << "\n";
  if (files.size() == 1) {
    for (std::size_t i = 1; i <= g.size(); ++i)
      out << "level." << i << ".order=" << g.level(i).order() << "\nlevel." << i << ".derived.order="
          << derived_subgroup(g.level(i)).order() << "\n";
    out << "coherent=yes\n";
    return ok;
  }
  const InverseSystem k = parse_tower(read_text_file(files[1]));
  const LevelwiseReport r = levelwise_integral_report(g, k, cfg.limits);
  bool undecided = false;
  for (std::size_t i = 0; i < r.levels.size(); ++i) {
    const auto& l = r.levels[i];
    out << "level." << i + 1 << ".derived-isomorphic=" << (l.derived_isomorphic ? "yes" : "no") << "\n";
    out << "level." << i + 1 << ".square-commutes=" << (l.square_commutes ? "yes" : "no") << "\n";
    if (!l.note.empty()) out << "level." << i + 1 << ".note=" << l.note << "\n";
    undecided |= l.note.find("not searched") != std::string::npos;
  }
  out << "holds=" << (r.holds ? "yes" : "no") << "\n";
  return undecided ? inconclusive : ok;
}

inline int cmd_catalog(const RunConfig& cfg, const std::string& action, std::uint64_t order, const std::string& file,
                       std::ostream& out) {
  if (action == "save") {
    if (order == 0) throw PreconditionError("catalog save needs --order");
    CatalogStore store = cfg.store();
    const std::filesystem::path path = file.empty() ? default_cache_dir(cfg.cache_dir) / ("order-" + std::to_string(order) + ".catalog")
                                                    : std::filesystem::path(file);
    save_catalog(store.get(order), path);
    out << "saved order " << order << " to " << path.string() << "\n";
    return ok;
  }
  if (file.empty()) throw PreconditionError("catalog " + action + " needs a file");
  const LoadResult r = load_catalog(file, cfg.limits);
  out << "catalog order=" << r.catalog.order << " count=" << r.catalog.entries.size() << "\n";
  for (const auto& w : r.warnings) out << "warning: " << w << "\n";
  if (action == "load") return ok;
  const auto problems = verify_catalog(r.catalog, cfg.limits);
  for (const auto& p : problems) out << "problem: " << p << "\n";
  out << (problems.empty() ? "verified\n" : "verification failed\n");
  return problems.empty() ? ok : error;
}

/// Runs the command line; returns the process exit code.
inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Integrals of finite groups: catalogs, searches, gauge and tower checks", "integrals"};
  app.require_subcommand(1);
  app.fallthrough();
  RunConfig cfg;
  std::string format = "text";
  app.add_option("--cache-dir", cfg.cache_dir, "catalog cache directory (overrides INTEGRALS_CACHE_DIR)");
  app.add_flag("--no-cache", cfg.no_cache, "keep catalogs in memory only");
  app.add_option("--workers", cfg.limits.workers, "worker threads")->capture_default_str();
  app.add_option("--format", format, "output format")->check(CLI::IsMember({"text", "machine"}))->capture_default_str();
  app.add_option("--seed", cfg.seed, "seed for sampled checks")->capture_default_str();
  app.add_option("--enumeration-threshold", cfg.limits.enumeration_threshold)->capture_default_str();
  app.add_option("--table-threshold", cfg.limits.table_threshold)->capture_default_str();
  app.add_option("--aut-gate", cfg.limits.aut_gate)->capture_default_str();
  app.add_option("--lattice-gate", cfg.limits.lattice_gate)->capture_default_str();
  app.add_option("--ball-cap", cfg.limits.ball_cap)->capture_default_str();
  app.add_option("--assignment-cap", cfg.limits.assignment_cap)->capture_default_str();
  app.add_option("--catalog-bound", cfg.limits.catalog_bound)->capture_default_str();

  std::string input;
  auto* analyze = app.add_subcommand("analyze", "order, centre, derived series, invariants, class, fingerprint");
  analyze->add_option("input", input, "descriptor, group file, or generators like \"(1 2 3);(1 2)\"")->required();

  std::string target, verify_file;
  std::uint64_t bound = 64;
  std::optional<std::uint64_t> prime;
  auto* integrate = app.add_subcommand("integrate", "search the catalogs for the smallest integral");
  integrate->add_option("--target", target, "target group");
  integrate->add_option("--bound", bound, "largest order searched")->capture_default_str();
  integrate->add_option("--p", prime, "search p-groups only");
  integrate->add_option("--verify", verify_file, "re-verify a machine-format report");

  std::uint64_t order = 0;
  std::string out_file;
  auto* enumerate = app.add_subcommand("enum", "list the groups of an order");
  enumerate->add_option("--order", order, "group order")->required();
  enumerate->add_option("--out", out_file, "also write the catalog file here");

  GaugeArgs ga;
  auto* gauge = app.add_subcommand("gauge", "identity checks on Cayley-graph balls");
  gauge->add_option("--preset", ga.preset, "abelian, A<m>, N<c>, exponent-2, metabelian, s3")->capture_default_str();
  gauge->add_option("--n", ga.n, "radius for the wreath experiment")->capture_default_str();
  gauge->add_option("--M", ga.M, "top cyclic group order (default 4n+2)");
  gauge->add_option("--N", ga.N, "generator shift (default 4n+1)");
  gauge->add_option("--group", ga.group, "check the preset on this group's generators instead");
  gauge->add_option("--k", ga.k, "ball radius with --group")->capture_default_str();

  std::vector<std::string> tower_files;
  auto* tower = app.add_subcommand("tower", "show a tower, or check K-levels integrate G-levels");
  tower->add_option("files", tower_files, "G-system [K-system]")->required();

  std::string cat_file;
  std::uint64_t cat_order = 0;
  auto* catalog = app.add_subcommand("catalog", "catalog files");
  catalog->require_subcommand(1);
  catalog->fallthrough();
  auto* cat_save = catalog->add_subcommand("save", "enumerate and write a catalog");
  cat_save->add_option("--order", cat_order, "group order")->required();
  cat_save->add_option("--out", cat_file, "file (default: the cache directory)");
  auto* cat_load = catalog->add_subcommand("load", "load and summarize a catalog file");
  cat_load->add_option("file", cat_file)->required();
  auto* cat_verify = catalog->add_subcommand("verify", "load and fully verify a catalog file");
  cat_verify->add_option("file", cat_file)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? ok : error;
  }
  cfg.machine = format == "machine";
  try {
    cfg.validate();
    if (*analyze) return cmd_analyze(cfg, input, out);
    if (*integrate) return cmd_integrate(cfg, target, bound, prime, verify_file, out);
    if (*enumerate) return cmd_enum(cfg, order, out_file, out);
    if (*gauge) return cmd_gauge(cfg, ga, out);
    if (*tower) return cmd_tower(cfg, tower_files, out);
    if (*cat_save) return cmd_catalog(cfg, "save", cat_order, cat_file, out);
    if (*cat_load) return cmd_catalog(cfg, "load", 0, cat_file, out);
    if (*cat_verify) return cmd_catalog(cfg, "verify", 0, cat_file, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return error;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return error;
  }
  return error;
}

}  // namespace integrals::cli
