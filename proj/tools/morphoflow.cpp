#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "morphoflow/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"morphoflow: growth-potential driven diffeomorphic shape evolution"};
  app.require_subcommand(1);

  std::string sim_cfg;
  auto* simulate = app.add_subcommand("simulate", "run the coupled simulation and write a trajectory");
  simulate->add_option("config", sim_cfg, "configuration file")->required()->check(CLI::ExistingFile);

  std::string grid_cfg, grid_text = "-0.8:0.8:5,-0.8:0.8:5";
  double t_prime = 15.0;
  std::size_t jobs = 1;
  auto* grid = app.add_subcommand("gridsearch", "varifold landscape over the potential center");
  grid->add_option("config", grid_cfg, "configuration file")->required()->check(CLI::ExistingFile);
  grid->add_option("--grid", grid_text, "x0:x1:nx,y0:y1:ny")->capture_default_str();
  grid->add_option("--tprime", t_prime, "comparison time T'")->capture_default_str();
  grid->add_option("--jobs", jobs, "worker threads")->capture_default_str()->check(CLI::PositiveNumber);

  std::string mesh_cfg;
  auto* mesh = app.add_subcommand("mesh", "write the reference mesh only");
  mesh->add_option("config", mesh_cfg, "configuration file")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  if (*simulate) return morphoflow::cmd_simulate(sim_cfg, std::cout, std::cerr);
  if (*grid) {
    morphoflow::GridSpec spec;
    try {
      spec = morphoflow::parse_grid_spec(grid_text);
    } catch (const std::exception& e) {
      std::cerr << "error: kind=parameter message=" << e.what() << std::endl;
      return 1;
    }
    return morphoflow::cmd_gridsearch(grid_cfg, spec, t_prime, jobs, std::cout, std::cerr);
  }
  return morphoflow::cmd_mesh(mesh_cfg, std::cout, std::cerr);
}
