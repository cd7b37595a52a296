#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bkvem/studies.hpp"

namespace {

struct Overrides {
  std::string config;
  std::optional<int> levels, k, l, threads;
  std::optional<double> theta;
  std::optional<std::string> family, out;
  std::optional<unsigned> seed;
  std::vector<std::string> set;
};

void add_flags(CLI::App* app, Overrides& o) {
  app->add_option("--config", o.config, "key = value configuration file");
  app->add_option("--levels", o.levels, "number of mesh levels / adaptive steps");
  app->add_option("--theta", o.theta, "Dorfler bulk parameter in (0, 1]");
  app->add_option("--family", o.family, "conforming | nonconforming");
  app->add_option("--k", o.k, "deflection degree");
  app->add_option("--l", o.l, "pressure degree");
  app->add_option("--out", o.out, "output directory");
  app->add_option("--seed", o.seed, "RNG seed");
  app->add_option("--threads", o.threads, "worker threads");
  app->add_option("--set", o.set, "extra key=value override, repeatable");
}

bkvem::RunConfig resolve(const Overrides& o) {
  bkvem::RunConfig c = o.config.empty() ? bkvem::RunConfig{} : bkvem::load_config(o.config);
  if (o.k) c.k = *o.k;
  if (o.l) c.l = *o.l;
  if (o.levels) c.levels = *o.levels;
  if (o.theta) {
    c.theta = *o.theta;
    c.refinement = bkvem::RefinementMode::Adaptive;
  }
  if (o.family) bkvem::set_config_value(c, "family", *o.family);
  if (o.out) c.out = *o.out;
  if (o.seed) c.seed = *o.seed;
  if (o.threads) c.threads = *o.threads;
  for (const auto& kv : o.set) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw bkvem::Error("--set expects key=value, got '" + kv + "'");
    bkvem::set_config_value(c, kv.substr(0, eq), kv.substr(eq + 1));
  }
  c.validate();
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Virtual element solver for the Biot-Kirchhoff poroelastic plate"};
  app.require_subcommand(1);
  Overrides conv, adapt, step, info;
  auto* c1 = app.add_subcommand("convergence", "uniform convergence study, writes rates.csv and levels.csv");
  auto* c2 = app.add_subcommand("adaptive", "SOLVE-ESTIMATE-MARK-REFINE loop, writes trace.csv");
  auto* c3 = app.add_subcommand("timestep", "backward Euler steps, writes steps.csv");
  auto* c4 = app.add_subcommand("mesh-info", "mesh statistics for the configured coarsest mesh");
  add_flags(c1, conv);
  add_flags(c2, adapt);
  add_flags(c3, step);
  add_flags(c4, info);
  CLI11_PARSE(app, argc, argv);

  bkvem::RunConfig cfg;
  try {
    if (*c1) cfg = resolve(conv);
    else if (*c2) cfg = resolve(adapt);
    else if (*c3) cfg = resolve(step);
    else cfg = resolve(info);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  }
  try {
    if (*c1) return bkvem::cmd_convergence(cfg, std::cout);
    if (*c2) return bkvem::cmd_adaptive(cfg, std::cout);
    if (*c3) return bkvem::cmd_timestep(cfg, std::cout);
    return bkvem::cmd_mesh_info(cfg, std::cout);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
