#include <iostream>

#include <CLI11.hpp>

#include "diffeo/cli/commands.hpp"

int main(int argc, char** argv) {
  using diffeo::cli::RunOptions;
  CLI::App app{"diffeo: tangent sets, flows and de Rham cohomology of diffeological spaces"};
  app.require_subcommand(1);

  RunOptions opts;
  std::string spec;
  double dt = 0.0, t_end = 0.0;
  int max_degree = -1, order = 0;
  std::vector<double> point;
  std::string field;

  auto common = [&](CLI::App* sub) {
    sub->add_option("spec", spec, "space description (JSON)")->required();
    sub->add_option("--tol", opts.tol, "plaque equivalence tolerance");
    sub->add_option("--svd-tol", opts.svd_tol, "relative singular-value threshold");
    sub->add_option("--dt", dt, "integration step");
    sub->add_option("--jobs", opts.jobs, "threads for matrix assembly")->check(CLI::PositiveNumber);
    sub->add_option("--point", point, "base point")->expected(1, 8);
  };
  auto* verify = app.add_subcommand("verify", "run invariant suites against the space");
  common(verify);
  verify->add_option("--suite", opts.suite, "plaque, tangent, dynamics, exterior or all");
  auto* cohomology = app.add_subcommand("cohomology", "Betti numbers of the represented complex");
  common(cohomology);
  cohomology->add_option("--max-degree", max_degree, "highest degree");
  auto* flow = app.add_subcommand("flow", "integrate a declared field");
  common(flow);
  flow->add_option("--field", field, "field name");
  flow->add_option("--t-end", t_end, "final time");
  auto* tangent = app.add_subcommand("tangent", "tangent-set summary at a point");
  common(tangent);
  tangent->add_option("--order", order, "tangency order")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : diffeo::cli::kExitSpecParse;
  }

  auto* sub = app.get_subcommands().front();
  if (sub->count("--dt")) opts.dt = dt;
  if (sub->count("--point")) opts.point = point;
  if (sub == cohomology && max_degree >= 0) opts.max_degree = max_degree;
  if (sub == flow && !field.empty()) opts.field = field;
  if (sub == flow && flow->count("--t-end")) opts.t_end = t_end;
  if (sub == tangent && order > 0) opts.order = order;

  nlohmann::json report;
  std::string diagnostics;
  const int code = diffeo::cli::run_command(sub->get_name(), spec, opts, report, diagnostics);
  std::cout << report.dump(2) << "\n";
  if (!diagnostics.empty()) std::cerr << diagnostics;
  return code;
}
