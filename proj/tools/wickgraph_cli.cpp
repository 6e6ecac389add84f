// wickgraph: evaluate time-ordered Gaussian moment integrals via labeled
// multigraphs with exact symmetry factors, and cross-check the result with
// the pairing oracle and Monte Carlo.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wickgraph/wickgraph.hpp"

namespace {

using wickgraph::json;

struct Options {
  std::string config_path;
  std::string poly_text;
  std::string poly_file;
  int n = -1;
  std::string kernel_name;
  double rho = 1.0;
  std::string grid_file;
  std::string quad_kind;
  int order = -1;
  int panels = -1;
  long long budget = -1;
  long long samples = -1;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int threads = 0;
  bool pretty = false;
  bool no_terms = false;
  bool dry_run = false;
  std::string out_path;

  // graphs subcommand positionals
  int graphs_n = 0;
  std::string graphs_degrees;

  // factor subcommand
  std::string matrix_text;
  std::string a_matrix_text;

  json config;  // parsed --config file, {} when absent
};

json config_section(const Options& o, const char* key) {
  if (o.config.is_object() && o.config.contains(key)) return o.config.at(key);
  return json();
}

wickgraph::Polynomial resolve_polynomial(const Options& o) {
  if (!o.poly_text.empty())
    return wickgraph::polynomial_from_json(
        wickgraph::parse_json_text(o.poly_text, "--poly"));
  if (!o.poly_file.empty())
    return wickgraph::polynomial_from_json(wickgraph::load_json_file(o.poly_file));
  if (auto j = config_section(o, "polynomial"); !j.is_null())
    return wickgraph::polynomial_from_json(j);
  if (auto j = config_section(o, "polynomial_file"); !j.is_null())
    return wickgraph::polynomial_from_json(wickgraph::load_json_file(j.get<std::string>()));
  throw wickgraph::ValidationError("no polynomial given (--poly, --poly-file or config)");
}

wickgraph::CovarianceKernel resolve_kernel(const Options& o) {
  if (!o.grid_file.empty()) return wickgraph::CovarianceKernel::load_grid_csv(o.grid_file);
  if (!o.kernel_name.empty())
    return wickgraph::CovarianceKernel::from_preset_name(o.kernel_name, o.rho);
  if (auto j = config_section(o, "kernel"); !j.is_null()) return wickgraph::kernel_from_json(j);
  throw wickgraph::ValidationError("no kernel given (--kernel, --grid-file or config)");
}

wickgraph::QuadratureRule resolve_quadrature(const Options& o) {
  wickgraph::QuadratureRule rule;
  if (auto j = config_section(o, "quadrature"); !j.is_null())
    rule = wickgraph::quadrature_from_json(j);
  if (!o.quad_kind.empty()) {
    if (o.quad_kind == "gauss_legendre")
      rule.kind = wickgraph::QuadratureRule::Kind::GaussLegendre;
    else if (o.quad_kind == "trapezoid")
      rule.kind = wickgraph::QuadratureRule::Kind::Trapezoid;
    else
      throw wickgraph::ValidationError("unknown quadrature kind: " + o.quad_kind);
  }
  if (o.order > 0) rule.order = o.order;
  if (o.panels > 0) rule.panels = o.panels;
  rule.validate();
  return rule;
}

int resolve_n(const Options& o) {
  if (o.n >= 0) return o.n;
  if (auto j = config_section(o, "n"); !j.is_null()) return j.get<int>();
  throw wickgraph::ValidationError("no order given (--n or config \"n\")");
}

wickgraph::EngineOptions resolve_engine_options(const Options& o) {
  wickgraph::EngineOptions eo;
  if (o.budget > 0)
    eo.term_budget = o.budget;
  else if (auto j = config_section(o, "budget"); !j.is_null())
    eo.term_budget = j.get<long long>();
  eo.store_terms = !o.no_terms;
  return eo;
}

wickgraph::McConfig resolve_mc_config(const Options& o) {
  wickgraph::McConfig cfg;
  if (o.samples > 0)
    cfg.samples = o.samples;
  else if (auto j = config_section(o, "samples"); !j.is_null())
    cfg.samples = j.get<long long>();
  if (o.seed_set)
    cfg.seed = o.seed;
  else if (auto j = config_section(o, "seed"); !j.is_null())
    cfg.seed = j.get<std::uint64_t>();
  cfg.threads = o.threads;
  return cfg;
}

void emit(const Options& o, const json& out, const std::string& pretty_text) {
  if (!o.out_path.empty()) {
    std::ofstream f(o.out_path);
    if (!f) throw wickgraph::ValidationError("cannot write " + o.out_path);
    f << out.dump() << "\n";
  }
  if (o.pretty)
    std::cout << pretty_text;
  else if (o.out_path.empty())
    std::cout << out.dump() << "\n";
}

std::string pretty_evaluation(const wickgraph::EvaluationResult& res) {
  std::ostringstream s;
  s.precision(12);
  s << "n = " << res.n << "\ntotal = " << res.total << "\n"
    << "terms = " << res.diagnostics.term_count
    << " (alpha tuples " << res.diagnostics.tuple_count << ", parity-skipped "
    << res.diagnostics.skipped_parity << ")\n"
    << "quadrature error envelope ~ " << res.diagnostics.quad_error_envelope << "\n";
  return s.str();
}

int run_evaluate(const Options& o) {
  const auto q = resolve_polynomial(o);
  const int n = resolve_n(o);
  const auto eo = resolve_engine_options(o);
  if (o.dry_run) {
    const long long count = wickgraph::count_terms(q, n, eo);
    emit(o, json{{"n", n}, {"estimated_terms", count}},
         "estimated terms: " + std::to_string(count) + "\n");
    return 0;
  }
  const auto kernel = resolve_kernel(o);
  const auto rule = resolve_quadrature(o);
  const auto res = wickgraph::evaluate(q, n, kernel, rule, eo);
  emit(o, wickgraph::result_to_json(res, !o.no_terms), pretty_evaluation(res));
  return 0;
}

int run_expand(const Options& o) {
  const auto q = resolve_polynomial(o);
  const int n = resolve_n(o);
  const auto eo = resolve_engine_options(o);
  const auto ex = wickgraph::expand_symbolic(q, n, eo);
  json out = wickgraph::expansion_to_json(ex, !o.no_terms);

  const bool have_kernel = !o.kernel_name.empty() || !o.grid_file.empty() ||
                           !config_section(o, "kernel").is_null();
  std::ostringstream pretty;
  pretty.precision(12);
  pretty << "n = " << n << ", aggregated shapes = " << ex.shapes.size() << "\n";
  for (const auto& sh : ex.shapes) {
    pretty << "  weight " << sh.weight << "  [";
    for (std::size_t i = 0; i < sh.components.size(); ++i) {
      if (i) pretty << ", ";
      pretty << sh.components[i].first << " x" << sh.components[i].second;
    }
    pretty << "]\n";
  }
  if (have_kernel) {
    const auto kernel = resolve_kernel(o);
    const auto rule = resolve_quadrature(o);
    const double total = wickgraph::evaluate_expansion(ex, kernel, rule);
    out["total"] = total;
    pretty << "total against kernel = " << total << "\n";
  }
  emit(o, out, pretty.str());
  return 0;
}

int run_oracle(const Options& o) {
  const auto q = resolve_polynomial(o);
  const int n = resolve_n(o);
  const auto kernel = resolve_kernel(o);
  const auto rule = resolve_quadrature(o);
  const auto res = wickgraph::evaluate(q, n, kernel, rule, resolve_engine_options(o));

  double oracle_total = 1.0;
  if (n >= 1) {
    wickgraph::detail::Kahan acc;
    wickgraph::for_each_alpha_tuple(q, n, [&](const wickgraph::AlphaTuple& t, double coeff) {
      acc.add(coeff * wickgraph::lhs_bruteforce(t, kernel, rule));
    });
    oracle_total = acc.sum / wickgraph::to_double(wickgraph::factorial(n));
  }
  const double diff = std::abs(res.total - oracle_total);
  std::ostringstream pretty;
  pretty.precision(12);
  pretty << "engine = " << res.total << "\noracle = " << oracle_total
         << "\n|diff| = " << diff << "\n";
  emit(o,
       json{{"n", n},
            {"engine", res.total},
            {"oracle", oracle_total},
            {"abs_diff", diff}},
       pretty.str());
  return 0;
}

int run_mc(const Options& o) {
  const auto q = resolve_polynomial(o);
  const int n = resolve_n(o);
  const auto kernel = resolve_kernel(o);
  const auto rule = resolve_quadrature(o);
  const auto cfg = resolve_mc_config(o);
  const auto res = wickgraph::evaluate(q, n, kernel, rule, resolve_engine_options(o));
  const auto est = wickgraph::mc_estimate(q, n, kernel, cfg);
  const double diff = std::abs(res.total - est.mean);
  const double sigmas = est.stderr_of_mean > 0 ? diff / est.stderr_of_mean : 0.0;
  std::ostringstream pretty;
  pretty.precision(12);
  pretty << "engine = " << res.total << "\nmc     = " << est.mean << " +- "
         << est.stderr_of_mean << "  (" << est.samples << " samples)\n|diff| = " << diff
         << " = " << sigmas << " sigma\n";
  json out = wickgraph::result_to_json(res, /*with_terms=*/false);
  out["mc"] = wickgraph::mc_to_json(est);
  out["mc"]["abs_diff"] = diff;
  out["mc"]["sigma_distance"] = sigmas;
  emit(o, out, pretty.str());
  return 0;
}

int run_graphs(const Options& o) {
  std::vector<int> degrees;
  std::stringstream ss(o.graphs_degrees);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      degrees.push_back(std::stoi(cell));
    } catch (const std::exception&) {
      throw wickgraph::ValidationError("bad degree '" + cell + "'");
    }
  }
  if (static_cast<int>(degrees.size()) != o.graphs_n)
    throw wickgraph::ValidationError("degree list length must equal n");
  const auto graphs = wickgraph::enumerate_multigraphs(o.graphs_n, degrees);
  json list = json::array();
  std::ostringstream pretty;
  for (const auto& g : graphs) {
    json item = wickgraph::multigraph_to_json(g);
    item["c"] = wickgraph::c_graph(g).str();
    list.push_back(item);
    pretty << "C = " << wickgraph::c_graph(g).str() << "  edges: " << g.edge_list_string()
           << "\n";
  }
  pretty << graphs.size() << " graphs\n";
  emit(o,
       json{{"n", o.graphs_n},
            {"degrees", degrees},
            {"count", graphs.size()},
            {"graphs", list}},
       pretty.str());
  return 0;
}

int run_factor(const Options& o) {
  if (o.matrix_text.empty())
    throw wickgraph::ValidationError("factor: need --matrix");
  const json mj = wickgraph::parse_json_text(o.matrix_text, "--matrix");
  const auto rows = mj.get<std::vector<std::vector<long long>>>();
  const auto m = wickgraph::IntMatrix::from_rows(rows);

  json out;
  std::ostringstream pretty;
  if (!o.a_matrix_text.empty()) {
    const json aj = wickgraph::parse_json_text(o.a_matrix_text, "--A");
    const auto a = wickgraph::IntMatrix::from_rows(aj.get<std::vector<std::vector<long long>>>());
    const auto c = wickgraph::c_general(m, a);
    out = json{{"c", c.str()}, {"kind", "general"}};
    pretty << "C(M,A) = " << c.str() << "\n";
  } else {
    std::vector<std::vector<int>> upper(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r)
      for (long long v : rows[r]) upper[r].push_back(static_cast<int>(v));
    const auto g = wickgraph::Multigraph::from_upper_rows(upper);
    const auto c = wickgraph::c_graph(g);
    const auto stats = wickgraph::factorial_stats(m);
    out = json{{"c", c.str()},
               {"kind", "graph"},
               {"degrees", g.degree_sequence()},
               {"stats",
                {{"S", stats.total_sum.str()},
                 {"P_factorial", stats.factorial_product.str()},
                 {"P", stats.entry_product.str()},
                 {"trace", stats.trace.str()}}}};
    pretty << "C(Gamma) = " << c.str() << "\n";
  }
  emit(o, out, pretty.str());
  return 0;
}

int run_fk(const Options& o) {
  const auto q = resolve_polynomial(o);
  const int truncation = resolve_n(o);
  const auto kernel = resolve_kernel(o);
  const auto rule = resolve_quadrature(o);
  const auto sums = wickgraph::fk_partial_sum(q, truncation, kernel, rule,
                                              resolve_engine_options(o));
  std::ostringstream pretty;
  pretty.precision(12);
  for (std::size_t i = 0; i < sums.partial_sums.size(); ++i)
    pretty << "I_" << i << " = " << sums.order_values[i] << "   S_" << i << " = "
           << sums.partial_sums[i] << "\n";
  pretty << "(formal partial sums; no convergence claim)\n";
  emit(o,
       json{{"truncation", truncation},
            {"orders", sums.order_values},
            {"partial_sums", sums.partial_sums},
            {"note", "formal asymptotic partial sums; no convergence claim"}},
       pretty.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  if (const char* env = std::getenv("WICKGRAPH_THREADS")) o.threads = std::atoi(env);
  if (o.threads < 1) o.threads = 1;

  CLI::App app{"time-ordered Gaussian moment integrals via labeled multigraphs"};
  app.require_subcommand(1);

  auto add_common = [&](CLI::App* cmd, bool with_kernel, bool with_poly) {
    cmd->add_option("--config", o.config_path, "JSON config file; inline flags override");
    cmd->add_option("--out", o.out_path, "write JSON to this file");
    cmd->add_flag("--pretty", o.pretty, "human-readable output instead of JSON");
    if (with_poly) {
      cmd->add_option("--poly", o.poly_text, "inline polynomial JSON");
      cmd->add_option("--poly-file", o.poly_file, "polynomial JSON file");
      cmd->add_option("--n", o.n, "expansion order n");
      cmd->add_option("--budget", o.budget, "term budget guard");
      cmd->add_flag("--no-terms", o.no_terms, "omit raw terms from result JSON");
    }
    if (with_kernel) {
      cmd->add_option("--kernel", o.kernel_name,
                      "preset: brownian_motion|brownian_bridge|product|constant|exponential");
      cmd->add_option("--rho", o.rho, "scale for the exponential preset");
      cmd->add_option("--grid-file", o.grid_file, "grid kernel CSV");
      cmd->add_option("--quad-kind", o.quad_kind, "gauss_legendre|trapezoid");
      cmd->add_option("--order", o.order, "quadrature order per panel");
      cmd->add_option("--panels", o.panels, "quadrature panels per axis");
    }
  };

  auto* evaluate = app.add_subcommand("evaluate", "evaluate the time-ordered integral");
  add_common(evaluate, true, true);
  evaluate->add_flag("--dry-run", o.dry_run, "count terms only, no integration");

  auto* expand = app.add_subcommand("expand", "kernel-free symbolic expansion");
  add_common(expand, true, true);

  auto* oracle = app.add_subcommand("oracle", "engine vs brute-force pairing oracle");
  add_common(oracle, true, true);

  auto* mc = app.add_subcommand("mc", "engine vs Monte Carlo estimate");
  add_common(mc, true, true);
  mc->add_option("--samples", o.samples, "Monte Carlo samples");
  mc->add_option("--seed", o.seed, "RNG master seed")->each([&](const std::string&) {
    o.seed_set = true;
  });
  mc->add_option("--threads", o.threads, "worker threads (default WICKGRAPH_THREADS or 1)");

  auto* graphs = app.add_subcommand("graphs", "enumerate multigraphs for a degree spec");
  graphs->add_option("n", o.graphs_n, "vertex count")->required();
  graphs->add_option("degrees", o.graphs_degrees, "comma-separated degrees, e.g. 2,2,2")
      ->required();
  add_common(graphs, false, false);

  auto* factor = app.add_subcommand("factor", "combinatorial factors C(Gamma) / C(M,A)");
  factor->add_option("--matrix", o.matrix_text, "matrix M as JSON rows, e.g. [[0,2],[0,0]]")
      ->required();
  factor->add_option("--A", o.a_matrix_text, "matrix A as JSON rows (general C(M,A))");
  add_common(factor, false, false);

  auto* fk = app.add_subcommand("fk", "formal perturbation-series partial sums");
  add_common(fk, true, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cout << json{{"error", std::string("argument error: ") + e.what()}}.dump() << "\n";
    return 2;
  }

  try {
    if (!o.config_path.empty()) o.config = wickgraph::load_json_file(o.config_path);
    if (evaluate->parsed()) return run_evaluate(o);
    if (expand->parsed()) return run_expand(o);
    if (oracle->parsed()) return run_oracle(o);
    if (mc->parsed()) return run_mc(o);
    if (graphs->parsed()) return run_graphs(o);
    if (factor->parsed()) return run_factor(o);
    if (fk->parsed()) return run_fk(o);
  } catch (const wickgraph::ValidationError& e) {
    std::cout << json{{"error", e.what()}}.dump() << "\n";
    return 2;
  } catch (const wickgraph::SamplingError& e) {
    std::cout << json{{"error", e.what()}}.dump() << "\n";
    return 2;
  } catch (const wickgraph::BudgetError& e) {
    std::cout << json{{"error", e.what()}}.dump() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cout << json{{"error", e.what()}}.dump() << "\n";
    return 1;
  }
  return 0;
}
