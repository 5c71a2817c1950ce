#include "exset_cli/cli.hpp"

#include <CLI11.hpp>

#include <ostream>
#include <string>

#include "commands.hpp"
#include "exset/error.hpp"

namespace exset::cli {

namespace {

std::string one_line(std::string s) {
  for (auto& c : s)
    if (c == '\n' || c == '\r') c = ' ';
  return s;
}

int report(std::ostream& err, int code, const char* kind, const std::string& msg, long long offset = -1) {
  err << "error kind=" << kind << " exit=" << code;
  if (offset >= 0) err << " offset=" << offset;
  err << " message=" << one_line(msg) << '\n';
  return code;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Three-phase excursion-set microstructure models: calibration, simulation, descriptors", "exset"};
  app.require_subcommand(1);

  FitArgs fit;
  auto* f = app.add_subcommand("fit", "Calibrate a model to the 2-D sections of a segmented volume");
  f->add_option("--algo", fit.algo, "tpcf, gan or combined (overrides the config)");
  f->add_option("--data", fit.data, "Segmented volume")->required();
  f->add_option("--config", fit.config, "Run configuration (JSON)")->required();
  f->add_option("--out", fit.out, "Checkpoint directory")->required();
  f->add_flag("--resume", fit.resume, "Continue from the checkpoint in --out if present");
  f->add_option("--threads", fit.threads, "Worker threads for batch members");

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "Simulate a hard realization");
  g->add_option("--params", gen.params, "Model parameters (JSON)")->required();
  g->add_flag("--anisotropic", gen.anisotropic, "Apply the fitted z-scaling");
  g->add_option("--s-hat", gen.s_hat, "z-scaling factor (overrides the parameter file)");
  g->add_option("--size", gen.size, "Extents NX NY [NZ]")->required()->expected(2, 3);
  g->add_option("--seed", gen.seed, "Seed");
  g->add_option("--out", gen.out, "Output volume")->required();
  g->add_option("--png", gen.png, "Also write one section as PNG");
  g->add_option("--png-z", gen.png_z, "Section index for --png");

  DescriptorsArgs desc;
  auto* d = app.add_subcommand("descriptors", "Morphological descriptors of a segmented volume");
  d->add_option("--volume", desc.volume, "Segmented volume")->required();
  d->add_option("--axis", desc.axis, "Transport axis x, y or z");
  d->add_option("--out", desc.out, "Output directory for CSV files")->required();
  d->add_option("--h-max", desc.h_max, "Largest two-point distance in voxels");
  d->add_flag("--no-transport", desc.no_transport, "Skip constrictivity and tortuosity");

  ScaleFitArgs sf;
  auto* s = app.add_subcommand("scale-fit", "Fit the z-scaling factor from directional chord lengths");
  s->add_option("--volume", sf.volume, "Segmented volume")->required();
  s->add_option("--out", sf.out, "Result (JSON)")->required();
  s->add_option("--params", sf.params, "Parameter file to annotate with the fitted value");
  s->add_option("--params-out", sf.params_out, "Where to write the annotated parameter file");

  ValidateArgs val;
  auto* v = app.add_subcommand("validate", "Compare model realizations with data");
  v->add_option("--params", val.params, "Model parameters (JSON)")->required();
  v->add_option("--data", val.data, "Segmented volume")->required();
  v->add_option("--n", val.n, "Number of realizations");
  v->add_option("--seed", val.seed, "Seed");
  v->add_option("--axis", val.axis, "Transport axis x, y or z");
  v->add_flag("--anisotropic", val.anisotropic, "Apply the fitted z-scaling");
  v->add_flag("--no-transport", val.no_transport, "Skip constrictivity and tortuosity");
  v->add_option("--out", val.out, "Comparison table (CSV)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    return report(err, kUsage, "usage", e.what());
  }

  try {
    if (f->parsed()) return cmd_fit(fit, out);
    if (g->parsed()) return cmd_generate(gen, out);
    if (d->parsed()) return cmd_descriptors(desc, out);
    if (s->parsed()) return cmd_scale_fit(sf, out);
    if (v->parsed()) return cmd_validate(val, out);
  } catch (const ParseError& e) {
    return report(err, kData, "parse", e.what(), static_cast<long long>(e.byte_offset()));
  } catch (const NumericalError& e) {
    return report(err, kNumerical, "numerical", e.what());
  } catch (const IoError& e) {
    return report(err, kData, "io", e.what());
  } catch (const DataError& e) {
    return report(err, kData, "data", e.what());
  } catch (const ContractError& e) {
    return report(err, kUsage, "usage", e.what());
  } catch (const std::exception& e) {
    return report(err, kInternal, "internal", e.what());
  }
  return report(err, kUsage, "usage", "no subcommand");
}

}  // namespace exset::cli
