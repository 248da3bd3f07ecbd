// imgreen <command> <config.json> [--out DIR]

#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "imgreen/cli/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Boundary Green operator identities, reconstruction and inversion"};
  std::string command, config_path, out_dir = "out";
  app.add_option("command", command, "verify | spectrum | reconstruct | invert | scan | disk-analytic")->required();
  app.add_option("config", config_path, "experiment configuration (JSON)")->required();
  app.add_option("--out", out_dir, "output directory");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : imgreen::cli::kConfigError;
  }

  nlohmann::json config;
  {
    std::ifstream f(config_path);
    if (!f) {
      std::cerr << "config error: cannot open " << config_path << "\n";
      return imgreen::cli::kConfigError;
    }
    try {
      f >> config;
    } catch (const nlohmann::json::exception& e) {
      std::cerr << "config error: " << config_path << " is not valid JSON: " << e.what() << "\n";
      return imgreen::cli::kConfigError;
    }
  }

  const imgreen::cli::RunResult rr = imgreen::cli::run(command, config, out_dir);
  if (!rr.message.empty()) {
    std::cerr << rr.message << "\n";
    return rr.exit_code;
  }
  for (const auto& r : rr.output.reports) {
    std::cout << (r.pass ? "PASS " : "FAIL ") << r.name;
    for (const char* key : {"potential", "k"}) {
      const auto it = r.context.find(key);
      if (it != r.context.end()) std::cout << " " << key << "=" << it->second;
    }
    std::cout << " residual=" << imgreen::io::format_double(r.residual)
              << " tolerance=" << imgreen::io::format_double(r.tolerance) << "\n";
  }
  for (const auto& note : rr.output.notes) std::cout << "note: " << note << "\n";
  std::cout << "wrote " << out_dir << "/report.json\n";
  return rr.exit_code;
}
