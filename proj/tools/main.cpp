#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "nilflow/errors.hpp"
#include "nilflow/run.hpp"

namespace {

struct Invocation {
  std::string config_path;
  std::vector<std::string> sets;
  std::string output_dir;
  // rigidity-step shortcuts
  std::string mu;
  std::string perturbation_file;
  std::string cutoff;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw nilflow::Error(nilflow::ErrorCode::Io, "cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int dispatch(const std::string& subcommand, const Invocation& inv) {
  try {
    const std::string text = inv.config_path.empty() ? std::string() : read_file(inv.config_path);
    nilflow::ConfigOverrides overrides;
    for (const auto& s : inv.sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) {
        throw nilflow::Error(nilflow::ErrorCode::ParseError, "--set expects key=value, got '" + s + "'");
      }
      overrides.emplace_back(s.substr(0, eq), s.substr(eq + 1));
    }
    if (!inv.output_dir.empty()) overrides.emplace_back("output_dir", inv.output_dir);
    if (!inv.mu.empty()) overrides.emplace_back("mu", inv.mu);
    if (!inv.perturbation_file.empty()) overrides.emplace_back("perturbation_file", inv.perturbation_file);
    if (!inv.cutoff.empty()) overrides.emplace_back("cutoff", inv.cutoff);
    const auto config = nilflow::parse_config(text, subcommand, overrides);
    return nilflow::run(config, std::cout, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << nilflow::error_json(e) << '\n';
    return nilflow::kExitError;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"nilflow: cohomological equations, GH certificates and KAM rigidity checks"};
  app.require_subcommand(1);
  Invocation inv;
  std::string chosen;

  for (const auto& name : nilflow::subcommand_names()) {
    auto* sub = app.add_subcommand(name, "run the " + name + " experiment");
    sub->add_option("-c,--config", inv.config_path, "config file with `key = value` lines");
    sub->add_option("-s,--set", inv.sets, "override a config key (key=value)");
    sub->add_option("-o,--output-dir", inv.output_dir, "write <subcommand>.csv and .jsonl here");
    if (name == "rigidity-step") {
      sub->add_option("--mu", inv.mu, "coordinate-change parameter mu");
      sub->add_option("--perturbation-file", inv.perturbation_file, "VfCochain text file");
      sub->add_option("--cutoff", inv.cutoff, "smoothing cutoff (negative disables)");
    }
    sub->callback([&chosen, name] { chosen = name; });
  }
  auto* from_file = app.add_subcommand("run", "run the experiment named by `subcommand = ...` in a config");
  from_file->add_option("config", inv.config_path, "config file")->required();
  from_file->add_option("-o,--output-dir", inv.output_dir, "write <subcommand>.csv and .jsonl here");
  from_file->callback([&chosen] { chosen = ""; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : nilflow::kExitError;
  }
  return dispatch(chosen, inv);
}
