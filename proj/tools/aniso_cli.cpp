// Command-line driver: runs verification experiments from JSON configs and
// prints the constant tables and the field catalog.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "aniso/io.hpp"

namespace fs = std::filesystem;

namespace {

aniso::json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  aniso::json j;
  in >> j;
  return j;
}

int cmd_run(const std::string& config_path, const std::string& out_dir, int jobs) {
  aniso::json config = load_json(config_path);
  aniso::RunOutcome outcome = aniso::run_config(config, jobs);
  outcome.report["timestamp"] = aniso::timestamp_now();

  fs::create_directories(out_dir);
  const std::string stem = fs::path(config_path).stem().string();
  const std::string report_path = (fs::path(out_dir) / (stem + "-report.json")).string();
  const std::string series_path = (fs::path(out_dir) / (stem + "-series.csv")).string();
  aniso::write_text_atomic(report_path, outcome.report.dump(2) + "\n");
  aniso::write_text_atomic(series_path, outcome.series_csv);

  std::cout << (outcome.all_pass ? "PASS" : "FAIL") << " " << config_path << "\n"
            << "report: " << report_path << "\nseries: " << series_path << "\n";
  return outcome.all_pass ? 0 : 1;
}

int cmd_constants(const std::string& spec_path, const std::string& out_dir) {
  aniso::OperatorSpec spec = aniso::spec_from_json(load_json(spec_path));
  aniso::json table = aniso::constants_table(spec);
  std::cout << aniso::format_constants_table(table);
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    const std::string stem = fs::path(spec_path).stem().string();
    aniso::write_text_atomic((fs::path(out_dir) / (stem + "-constants.json")).string(),
                             table.dump(2) + "\n");
  }
  return 0;
}

int cmd_list_builtins() {
  std::cout << aniso::catalog_to_json().dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"anisotropic mixed-order operator toolkit"};
  app.require_subcommand(1);

  std::string config_path, spec_path, out_dir = ".";
  int jobs = 1;

  CLI::App* run = app.add_subcommand("run", "execute an experiment config");
  run->add_option("config", config_path, "JSON run configuration")->required();
  run->add_option("--out", out_dir, "output directory");
  run->add_option("--jobs", jobs, "parallel workers for multi-case experiments");

  CLI::App* constants = app.add_subcommand("constants", "print the constant table of a spec");
  constants->add_option("spec", spec_path, "operator spec JSON")->required();
  std::string const_out;
  constants->add_option("--out", const_out, "also write the table as JSON here");

  app.add_subcommand("list-builtins", "print the field catalog");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(config_path, out_dir, jobs);
    if (constants->parsed()) return cmd_constants(spec_path, const_out);
    return cmd_list_builtins();
  } catch (const aniso::json::exception& e) {
    std::cerr << "error: malformed config: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
