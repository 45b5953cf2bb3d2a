#include "viscontact/cli.hpp"

#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "viscontact/errors.hpp"
#include "viscontact/run_config.hpp"
#include "viscontact/verification.hpp"
#include "viscontact/vtk_io.hpp"

namespace viscontact {

namespace {

struct MeshArgs {
  std::string preset = "notched";
  std::string out;
  double width = 2.0, height = 1.0;
  double slit_x0 = 0.5, slit_x1 = 1.5, slit_y = 0.5;
  double gap = 0.01;
  int resolution = 12;
};

int run_mesh(const MeshArgs& args) {
  Mesh2D mesh;
  if (args.preset == "notched")
    mesh = build_notched_rectangle(args.width, args.height, args.slit_x0, args.slit_x1,
                                   args.slit_y, args.gap, args.resolution);
  else if (args.preset == "rectangle")
    mesh = build_rectangle(args.width, args.height, args.resolution);
  else
    throw Error("unknown preset '" + args.preset + "' (want notched or rectangle)");

  const MeshReport report = validate(mesh);
  if (!report.all_pass()) throw Error("generated mesh failed validation:\n" + report.summary());
  save_text(args.out, write_mesh(mesh));
  std::cout << "wrote " << args.out << ": " << mesh.node_count() << " nodes, "
            << mesh.triangle_count() << " triangles, "
            << match_contact_pairs(mesh).count() << " contact pairs\n";
  return 0;
}

struct SolveArgs {
  std::string config;
  std::string mesh;
  std::string out;
};

int run_solve(const SolveArgs& args) {
  RunConfig cfg = parse_config(load_text(args.config), args.mesh.empty());
  if (!args.mesh.empty()) cfg.mesh_file = args.mesh;
  if (!args.out.empty()) cfg.out_dir = args.out;

  std::vector<std::string> warnings;
  const Mesh2D mesh = load_mesh(load_text(cfg.mesh_file), &warnings);
  for (const std::string& w : warnings) std::cerr << "mesh: " << w << "\n";

  const AssembledProblem problem(make_problem_spec(cfg, mesh));
  const DiscreteState state = solve(problem);

  save_text(cfg.out_dir + "/config.txt", effective_config(cfg));
  save_text(cfg.out_dir + "/timeseries.csv", timeseries_csv(problem, state));
  for (int j = 0; j < state.grid.node_count(); ++j) {
    char name[32];
    std::snprintf(name, sizeof(name), "state_%04d.vtk", j);
    save_text(cfg.out_dir + "/" + name, vtk_snapshot(problem, state, j, cfg.fields));
  }

  std::cout << "solved " << state.grid.node_count() << " nodes (dt "
            << state.grid.dt << ", scheme " << to_string(problem.spec().config.scheme)
            << ", rule " << to_string(problem.spec().config.quadrature) << "), "
            << state.sweeps << " fixed-point sweeps, outputs in " << cfg.out_dir << "\n";
  return 0;
}

struct VerifyArgs {
  std::uint64_t seed = 42;
  std::string out;
};

int run_verify(const VerifyArgs& args) {
  const std::vector<CheckReport> reports = run_verify_suite(args.seed);
  std::cout << format_table(reports);
  if (!args.out.empty()) {
    std::ostringstream csv;
    csv << "name,measured,bound,pass\n";
    for (const CheckReport& r : reports) {
      char line[160];
      std::snprintf(line, sizeof(line), "%s,%.17g,%.17g,%d\n", r.name.c_str(), r.measured,
                    r.bound, r.pass ? 1 : 0);
      csv << line;
    }
    save_text(args.out, csv.str());
  }
  for (const CheckReport& r : reports)
    if (!r.pass) return 1;
  return 0;
}

struct StudyArgs {
  std::string config;
  std::string mesh;
  std::string dts = "0.1,0.05,0.025,0.0125";
  double ref = 0.003125;
  std::string out;
};

int run_study(const StudyArgs& args) {
  RunConfig cfg = parse_config(load_text(args.config), args.mesh.empty());
  if (!args.mesh.empty()) cfg.mesh_file = args.mesh;
  const Mesh2D mesh = load_mesh(load_text(cfg.mesh_file));
  const ProblemSpec spec = make_problem_spec(cfg, mesh);

  std::vector<double> dts;
  std::string item;
  std::istringstream in(args.dts);
  while (std::getline(in, item, ',')) dts.push_back(std::stod(item));

  const ConvergenceStudy study = convergence_study(spec, dts, args.ref);
  std::ostringstream table;
  table << "dt,error\n";
  for (std::size_t i = 0; i < study.dts.size(); ++i) {
    char line[80];
    std::snprintf(line, sizeof(line), "%.17g,%.17g\n", study.dts[i], study.errors[i]);
    table << line;
  }
  std::cout << table.str();
  std::printf("fitted order %.6g (%s, reference dt %.17g)\n", study.order,
              to_string(spec.config.quadrature), args.ref);
  if (!study.monotone) std::cout << "warning: errors are not monotone in dt\n";
  if (!args.out.empty()) save_text(args.out, table.str());
  return 0;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"quasistatic frictionless self-contact of a viscoplastic body"};
  app.require_subcommand(1);

  MeshArgs mesh_args;
  CLI::App* mesh_cmd = app.add_subcommand("mesh", "write a preset mesh file");
  mesh_cmd->add_option("--preset", mesh_args.preset, "notched or rectangle");
  mesh_cmd->add_option("--out", mesh_args.out, "output path")->required();
  mesh_cmd->add_option("--width", mesh_args.width);
  mesh_cmd->add_option("--height", mesh_args.height);
  mesh_cmd->add_option("--slit-x0", mesh_args.slit_x0);
  mesh_cmd->add_option("--slit-x1", mesh_args.slit_x1);
  mesh_cmd->add_option("--slit-y", mesh_args.slit_y);
  mesh_cmd->add_option("--gap", mesh_args.gap);
  mesh_cmd->add_option("--resolution", mesh_args.resolution);

  SolveArgs solve_args;
  CLI::App* solve_cmd = app.add_subcommand("solve", "run the integrator per config");
  solve_cmd->add_option("--config", solve_args.config, "run configuration file")->required();
  solve_cmd->add_option("--mesh", solve_args.mesh, "mesh file (overrides mesh.file)");
  solve_cmd->add_option("--out", solve_args.out, "output directory (overrides out.dir)");

  VerifyArgs verify_args;
  CLI::App* verify_cmd = app.add_subcommand("verify", "run the certification suite");
  verify_cmd->add_option("--seed", verify_args.seed, "sampling seed");
  verify_cmd->add_option("--out", verify_args.out, "also write the report as CSV");

  StudyArgs study_args;
  CLI::App* study_cmd = app.add_subcommand("study", "time-step self-convergence study");
  study_cmd->add_option("--config", study_args.config, "run configuration file")->required();
  study_cmd->add_option("--mesh", study_args.mesh, "mesh file (overrides mesh.file)");
  study_cmd->add_option("--dts", study_args.dts, "comma-separated list of time steps");
  study_cmd->add_option("--ref", study_args.ref, "reference time step");
  study_cmd->add_option("--out", study_args.out, "also write dt/error table as CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (mesh_cmd->parsed()) return run_mesh(mesh_args);
    if (solve_cmd->parsed()) return run_solve(solve_args);
    if (verify_cmd->parsed()) return run_verify(verify_args);
    if (study_cmd->parsed()) return run_study(study_args);
  } catch (const NonconvergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

}  // namespace viscontact
