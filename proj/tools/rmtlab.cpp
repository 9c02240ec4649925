#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rmtlab/cli.hpp"

namespace {

struct Flags {
  std::string config;
  std::optional<std::string> seed;
  std::optional<std::string> out;
  std::optional<std::string> format;
  std::optional<int> threads;
  std::optional<double> tolerance;
  std::vector<std::string> sets;
};

void add_common(CLI::App* app, Flags& f) {
  app->add_option("--config", f.config, "key = value config, or an earlier output with its manifest");
  app->add_option("--seed", f.seed, "u64 seed (falls back to the config, then RMTLAB_SEED)");
  app->add_option("--out", f.out, "output path (stdout when absent)");
  app->add_option("--format", f.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  app->add_option("--threads", f.threads, "worker threads for Monte Carlo")->check(CLI::PositiveNumber);
  app->add_option("--tolerance", f.tolerance, "relative tolerance for exact comparisons")->check(CLI::PositiveNumber);
  app->add_option("--set", f.sets, "extra key=value parameters")->take_all();
}

rmtlab::Config assemble(const std::string& command, const Flags& f) {
  rmtlab::Config cfg = f.config.empty() ? rmtlab::Config::parse_text("", "<command line>") : rmtlab::load_config_file(f.config);
  if (command != "run") {
    if (cfg.has("command") && cfg.get_string("command") != command)
      throw rmtlab::ConfigError(cfg.source() + ": config is for '" + cfg.get_string("command") + "', not '" + command + "'");
    cfg.set("command", command);
  }
  if (!cfg.has("seed"))
    if (const char* env = std::getenv("RMTLAB_SEED")) cfg.set("seed", env);
  if (f.seed) cfg.set("seed", *f.seed);
  if (f.format) cfg.set("format", *f.format);
  if (f.threads) cfg.set("threads", std::to_string(*f.threads));
  if (f.tolerance) {
    std::ostringstream os;
    os.precision(17);
    os << *f.tolerance;
    cfg.set("tolerance", os.str());
  }
  for (const auto& s : f.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw rmtlab::ConfigError("--set: expected key=value, got '" + s + "'");
    cfg.set(s.substr(0, eq), s.substr(eq + 1));
  }
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rmtlab: moments, oracles and simulations for products of random matrices"};
  app.require_subcommand(1);
  Flags flags;
  std::vector<std::pair<std::string, CLI::App*>> subs;
  for (const auto& c : rmtlab::manifest_commands()) subs.emplace_back(c, app.add_subcommand(c));
  subs.emplace_back("run", app.add_subcommand("run", "rerun a manifest; the command comes from the config"));
  subs[0].second->description("evaluate one formula");
  subs[1].second->description("Monte Carlo estimates of spectral statistics");
  subs[2].second->description("formula vs oracle vs Monte Carlo verdicts");
  subs[3].second->description("limit shape moments over k");
  subs[4].second->description("rescaled edge trajectories of Ginibre products");
  for (auto& [name, sub] : subs) add_common(sub, flags);
  CLI11_PARSE(app, argc, argv);

  std::string command;
  for (auto& [name, sub] : subs)
    if (sub->parsed()) command = name;

  try {
    rmtlab::Config cfg = assemble(command, flags);
    rmtlab::Manifest m = rmtlab::manifest_from_config(cfg);
    if (flags.out) m.out = *flags.out;
    if (m.command.empty()) throw rmtlab::ConfigError(cfg.source() + ": no command given");
    if (m.out.empty()) return rmtlab::run_manifest(m, std::cout);
    std::ofstream os(m.out);
    if (!os) throw rmtlab::ConfigError("cannot write '" + m.out + "'");
    return rmtlab::run_manifest(m, os);
  } catch (const rmtlab::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
