#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "rhocalc/session.hpp"

namespace {

bool read_source(const std::string& path, std::string& out) {
  if (path == "-") {
    std::ostringstream ss;
    ss << std::cin.rdbuf();
    out = ss.str();
    return true;
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::cerr << "rhocalc: cannot read " << path << "\n";
    return false;
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  out = ss.str();
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact rho-commutative graded algebra and geometry"};
  app.require_subcommand(1);

  rhocalc::RunOptions opts;
  opts.trunc = rhocalc::trunc_from_env();
  std::string file;
  bool json = false;

  auto* run = app.add_subcommand("run", "Run a session file and print its reports");
  run->add_option("file", file, "Session file, or - for stdin")->required();
  run->add_flag("--json", json, "Emit the versioned JSON report");
  run->add_option("--trunc", opts.trunc, "I-adic truncation order (default RHOCALC_TRUNC or 8)")
      ->check(CLI::Range(0, 1000));
  run->add_option("--bound", opts.degree_bound, "Exponent bound of the exactness search")->check(CLI::Range(0, 64));

  auto* modular = app.add_subcommand("modular", "Print the modular class reports of a session file as JSON");
  modular->add_option("file", file, "Session file, or - for stdin")->required();
  modular->add_option("--trunc", opts.trunc, "I-adic truncation order")->check(CLI::Range(0, 1000));
  modular->add_option("--bound", opts.degree_bound, "Exponent bound of the exactness search")->check(CLI::Range(0, 64));

  std::string which = "all";
  auto* scenarios = app.add_subcommand("scenarios", "Print the built-in scenarios as JSON");
  scenarios->add_option("name", which, "torus, derham, cstar, lift or all")
      ->check(CLI::IsMember({"torus", "derham", "cstar", "lift", "all"}));
  scenarios->add_option("--bound", opts.degree_bound, "Exponent bound of the exactness search")->check(CLI::Range(0, 64));

  CLI11_PARSE(app, argc, argv);

  std::string src;
  if (*scenarios) {
    src = "scenarios " + which + ";";
  } else if (!read_source(file, src)) {
    return 2;
  }

  rhocalc::SessionOutcome out = rhocalc::run_text(src, opts);
  if (*run && !json) {
    std::cout << rhocalc::to_text(out);
  } else if (*run) {
    std::cout << rhocalc::to_json(out).dump(2) << "\n";
  } else if (*modular) {
    std::cout << rhocalc::modular_reports(out).dump(2) << "\n";
  } else {
    const auto& r = out.reports.front();
    if (!r.ok) {
      std::cerr << "rhocalc: " << r.error["message"].get<std::string>() << "\n";
      return 1;
    }
    rhocalc::Json j{{"schema", 1}, {"scenarios", r.result["scenarios"]}};
    std::cout << j.dump(2) << "\n";
  }
  if (!out.ok() && (*modular || (*run && json))) {
    for (const auto& r : out.reports)
      if (!r.ok)
        std::cerr << "rhocalc: " << r.error["code"].get<std::string>() << " at " << r.error["line"] << ":"
                  << r.error["col"] << ": " << r.error["message"].get<std::string>() << "\n";
  }
  return out.ok() ? 0 : 1;
}
