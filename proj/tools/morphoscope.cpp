#include <iostream>

#include <CLI11.hpp>

#include "morphoscope/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"morphoscope: harmonic morphisms, their Hermitian structures and twistor lifts"};
  app.require_subcommand(1);

  morpho::RunOptions opts;
  std::string point;
  std::uint64_t seed = 0;
  double fd_step = 0.0;
  std::string patch;

  auto add_common = [&](CLI::App* sub, bool needs_config) {
    auto* cfg = sub->add_option("--config", opts.config, "Config file or catalog:NAME");
    if (needs_config) cfg->required();
    sub->add_option("--out", opts.out_dir, "Directory for report files")->capture_default_str();
    sub->add_option("--format", opts.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--seed", seed, "Override analysis.seed");
    sub->add_option("--fd-step", fd_step, "Override analysis.fd_step");
    sub->add_option("--workers", opts.workers, "Worker threads for scans")->check(CLI::PositiveNumber);
  };

  CLI::App* validate = app.add_subcommand("validate", "Check horizontal weak conformality and harmonicity");
  add_common(validate, true);
  CLI::App* analyze = app.add_subcommand("analyze", "Splitting, J+ and J-, residuals at a point");
  add_common(analyze, true);
  analyze->add_option("--point", point, "x1,x2,x3,x4");
  CLI::App* symbol = app.add_subcommand("symbol", "Symbol and compatible complex structures at a critical point");
  add_common(symbol, true);
  symbol->add_option("--point", point, "x1,x2,x3,x4");
  CLI::App* rate = app.add_subcommand("rate", "Rate of approach of J+ to J0, remainder and dilation rates");
  add_common(rate, true);
  rate->add_option("--point", point, "x1,x2,x3,x4");
  CLI::App* weingarten = app.add_subcommand("weingarten", "Weingarten coefficients and covariant derivatives of J");
  add_common(weingarten, true);
  auto* wpoint = weingarten->add_option("--point", point, "x1,x2,x3,x4");
  weingarten->add_flag("--scan", opts.scan, "Scan annuli around the analysis center")->excludes(wpoint);
  CLI::App* twistor = app.add_subcommand("twistor", "Twistor lifts of the configured surface patches");
  add_common(twistor, true);
  twistor->add_option("--patch", patch, "Patch name (default: all)");
  CLI::App* catalog = app.add_subcommand("catalog", "List built-in scenarios and export their configs");
  add_common(catalog, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  CLI::App* sub = app.get_subcommands().front();
  opts.command = sub->get_name();
  try {
    if (!point.empty()) opts.point = morpho::parse_point(point);
  } catch (const morpho::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  if (sub->count("--seed")) opts.seed = seed;
  if (sub->count("--fd-step")) opts.fd_step = fd_step;
  if (!patch.empty()) opts.patch = patch;

  const morpho::RunResult r = morpho::run(opts, std::cout, std::cerr);
  for (const auto& f : r.files) std::cout << "wrote " << f << '\n';
  return r.exit_code;
}
