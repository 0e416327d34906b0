#include "cli.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "pdeblur/bench.hpp"
#include "pdeblur/degradation.hpp"
#include "pdeblur/error.hpp"
#include "pdeblur/image.hpp"
#include "pdeblur/metrics.hpp"
#include "pdeblur/solver.hpp"

namespace pdeblur::cli {

namespace {

constexpr const char* kSpecHelp = R"(Spec file format (flat key = value, '#' comments):
  [experiment]            starts a new table cell (optional for the first)
  image  = synthetic:128  or a PGM/PNG path
  label  = Synthetic
  blur   = none | motion:LEN:ANGLE | gaussian:RADIUS:SIGMA
  peak   = 255
  seed   = 42
  lambda = 6              default lambda for the cell's models
  model  = LABEL [base=tv|l2l1|our] [mu=..] [lambda=..] [p=..] [gamma1=..] [gamma3=..] [tol=..] [max_iter=..]
)";

std::string format_number(double v, int digits) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string sanitize(const std::string& s) {
  std::string out;
  for (char c : s) out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_') ? c : '_';
  return out;
}

struct DegradeArgs {
  std::string in, out, blur = "none";
  double peak = 255.0;
  std::uint64_t seed = 0;
};

struct DenoiseArgs {
  std::string in, out, blur = "none", trace, model = "our";
  std::optional<double> mu, lambda, p, gamma1, gamma3, tol;
  std::optional<int> max_iter;
};

struct MetricsArgs {
  std::string restored, reference;
  bool global = false;
};

struct BenchArgs {
  std::string preset, spec, format = "csv", trace_dir, image_dir = ".", output;
};

int cmd_synth(const std::string& out_path, std::size_t size, std::ostream& out) {
  save_image(make_synthetic(size), out_path);
  out << "wrote " << out_path << " (" << size << "x" << size << ")\n";
  return 0;
}

int cmd_degrade(const DegradeArgs& a, std::ostream& out) {
  DegradationSpec spec;
  spec.blur = parse_blur(a.blur);
  spec.noise_peak = a.peak;
  spec.seed = a.seed;
  const ImageGrid clean = load_source(a.in);
  save_image(degrade(clean, spec), a.out);
  out << "wrote " << a.out << " (blur " << to_string(spec.blur) << ", peak " << a.peak << ", seed " << a.seed << ")\n";
  return 0;
}

int cmd_denoise(const DenoiseArgs& a, std::ostream& out) {
  SolverConfig cfg;
  const double lambda = a.lambda.value_or(cfg.lambda);
  if (a.model == "tv") cfg = SolverConfig::tv(lambda);
  else if (a.model == "l2l1") cfg = SolverConfig::l2l1(lambda);
  else cfg = SolverConfig::l2lp(lambda);
  if (a.mu) cfg.mu = *a.mu;
  if (a.p) cfg.p = *a.p;
  if (a.gamma1) cfg.gamma1 = cfg.gamma2 = *a.gamma1;
  if (a.gamma3) cfg.gamma3 = *a.gamma3;
  if (a.tol) cfg.eps_tol = *a.tol;
  if (a.max_iter) cfg.max_iter = *a.max_iter;
  cfg.validate();
  const Psf psf = make_psf(parse_blur(a.blur));

  const ImageGrid f = load_source(a.in);
  const RunResult result = run(f, psf, cfg);
  save_image(result.restored, a.out);
  if (!a.trace.empty()) {
    std::ofstream trace(a.trace);
    if (!trace) throw InputError("cannot write trace file " + a.trace);
    result.trace.write_csv(trace);
  }
  const double rel = result.trace.records.empty() ? 0.0 : result.trace.records.back().rel_change;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3e", rel);
  out << "iterations=" << result.iterations << " rel_change=" << buf
      << (result.converged ? " (converged)" : " (iteration cap reached)") << '\n';
  return 0;
}

int cmd_metrics(const MetricsArgs& a, std::ostream& out) {
  const ImageGrid restored = load_image(a.restored);
  const ImageGrid reference = load_image(a.reference);
  if (!restored.same_shape(reference))
    throw InputError("image dimensions differ: " + std::to_string(restored.height()) + "x" +
                     std::to_string(restored.width()) + " vs " + std::to_string(reference.height()) + "x" +
                     std::to_string(reference.width()));
  const QualityReport q = assess(restored, reference, a.global ? SsimMode::Global : SsimMode::Windowed);
  out << "PSNR=" << format_number(q.psnr, 2) << ", SNR=" << format_number(q.snr, 2)
      << ", SSIM=" << format_number(q.ssim, 4) << '\n';
  return 0;
}

int cmd_bench(const BenchArgs& a, std::ostream& out, std::ostream& err) {
  const auto format = parse_table_format(a.format);
  if (!format) throw InputError("unknown format '" + a.format + "' (expected csv or markdown)");
  if (a.preset.empty() == a.spec.empty()) throw InputError("give exactly one of --preset or --spec");

  const BenchPlan plan = a.preset.empty() ? parse_spec_file(a.spec) : make_preset(a.preset, a.image_dir);
  for (const auto& w : plan.warnings) err << w << '\n';

  std::vector<ExperimentRow> rows;
  for (const auto& spec : plan.experiments) {
    ExperimentResult result = run_experiment(spec);
    for (auto& row : result.rows) {
      if (!row.error.empty()) err << "error: " << row.image << " / " << row.model << ": " << row.error << '\n';
      if (!a.trace_dir.empty() && row.error.empty()) {
        const std::filesystem::path dir(a.trace_dir);
        std::filesystem::create_directories(dir);
        const auto path = dir / (sanitize(row.image) + "_" + sanitize(row.model) + ".csv");
        std::ofstream trace(path);
        if (!trace) throw InputError("cannot write trace file " + path.string());
        row.trace.write_csv(trace);
      }
      rows.push_back(std::move(row));
    }
  }

  const std::string table = emit_table(rows, *format);
  if (a.output.empty()) {
    out << table;
  } else {
    std::ofstream file(a.output);
    if (!file) throw InputError("cannot write " + a.output);
    file << table;
  }
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Poisson image restoration with the l2-lp variational model"};
  app.name(args.empty() ? "pdeblur" : args[0]);
  app.require_subcommand(1);

  std::string synth_out;
  std::size_t synth_size = 128;
  auto* synth = app.add_subcommand("synth", "Write the synthetic piecewise-constant test image");
  synth->add_option("out", synth_out, "Output image (.pgm or .png)")->required();
  synth->add_option("--size", synth_size, "Side length in pixels (>= 32)")->capture_default_str();

  DegradeArgs dg;
  auto* degrade_cmd = app.add_subcommand("degrade", "Blur, then add Poisson noise");
  degrade_cmd->add_option("in", dg.in, "Clean image (PGM/PNG or synthetic:SIZE)")->required();
  degrade_cmd->add_option("out", dg.out, "Degraded image (.pgm or .png)")->required();
  degrade_cmd->add_option("--blur", dg.blur, "none | motion:LEN:ANGLE | gaussian:RADIUS:SIGMA")->capture_default_str();
  degrade_cmd->add_option("--peak", dg.peak, "Photon count mapped to intensity 255 (inf: no noise)")->capture_default_str();
  degrade_cmd->add_option("--seed", dg.seed, "Noise seed")->capture_default_str();

  DenoiseArgs dn;
  auto* denoise_cmd = app.add_subcommand(
      "denoise",
      "Restore an image with the augmented Lagrangian solver.\n"
      "Defaults: mu=0.01, lambda=6, p=0.5, gamma1=gamma2=0.5, gamma3=30, tol=1e-4, max-iter=250.\n"
      "--model tv sets mu=0,p=1; --model l2l1 sets p=1; explicit flags override the model.");
  denoise_cmd->add_option("in", dn.in, "Observed image (PGM/PNG)")->required();
  denoise_cmd->add_option("out", dn.out, "Restored image (.pgm or .png)")->required();
  denoise_cmd->add_option("--model", dn.model, "our | l2l1 | tv")
      ->check(CLI::IsMember({"our", "l2l1", "tv"}))
      ->capture_default_str();
  denoise_cmd->add_option("--mu", dn.mu, "Smoothness weight mu [0.01; tv: 0]");
  denoise_cmd->add_option("--lambda", dn.lambda, "Fidelity weight lambda [6]");
  denoise_cmd->add_option("--p", dn.p, "Shrinkage exponent in (0,1] [0.5; tv, l2l1: 1]");
  denoise_cmd->add_option("--gamma1", dn.gamma1, "Penalty gamma1 = gamma2 [0.5]");
  denoise_cmd->add_option("--gamma3", dn.gamma3, "Penalty gamma3 [30]");
  denoise_cmd->add_option("--tol", dn.tol, "Relative-change tolerance [1e-4]");
  denoise_cmd->add_option("--max-iter", dn.max_iter, "Iteration cap [250]");
  denoise_cmd->add_option("--blur", dn.blur, "Blur of the observation: none | motion:LEN:ANGLE | gaussian:RADIUS:SIGMA")
      ->capture_default_str();
  denoise_cmd->add_option("--trace", dn.trace, "Write the per-iteration trace CSV here");

  MetricsArgs mt;
  auto* metrics_cmd = app.add_subcommand("metrics", "PSNR, SNR and SSIM of an image against a reference");
  metrics_cmd->add_option("restored", mt.restored, "Image to score")->required();
  metrics_cmd->add_option("reference", mt.reference, "Clean reference")->required();
  metrics_cmd->add_flag("--global", mt.global, "Single-window SSIM over the whole image");

  BenchArgs bn;
  auto* bench_cmd = app.add_subcommand("bench", "Run a table of experiments and print PSNR/SNR/SSIM rows");
  bench_cmd->footer(std::string("Presets use mu=0.01, gamma1=gamma2=0.5, gamma3=30, tol=1e-4, max 250 iterations;\n"
                                "table1: Poisson only, lambda 6/7/5; table2: motion:10:90, lambda 8/8/10;\n"
                                "table3: gaussian:3:3, lambda 8/6/6 (Peppers gamma3=25).\n\n") +
                    kSpecHelp);
  auto* preset_opt = bench_cmd->add_option("--preset", bn.preset, "table1 | table2 | table3")
                         ->check(CLI::IsMember({"table1", "table2", "table3"}));
  auto* spec_opt = bench_cmd->add_option("--spec", bn.spec, "Experiment spec file");
  preset_opt->excludes(spec_opt);
  bench_cmd->add_option("--format", bn.format, "csv | markdown")->capture_default_str();
  bench_cmd->add_option("--trace-dir", bn.trace_dir, "Write one trace CSV per row into this directory");
  bench_cmd->add_option("--image-dir", bn.image_dir, "Where lena.* and peppers.* are looked up")->capture_default_str();
  bench_cmd->add_option("-o,--output", bn.output, "Write the table to a file instead of stdout");

  std::vector<std::string> rest(args.size() > 1 ? args.begin() + 1 : args.end(), args.end());
  std::reverse(rest.begin(), rest.end());
  try {
    app.parse(rest);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    const auto* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
    err << sub->help();
    return 1;
  }

  try {
    if (app.got_subcommand(synth)) return cmd_synth(synth_out, synth_size, out);
    if (app.got_subcommand(degrade_cmd)) return cmd_degrade(dg, out);
    if (app.got_subcommand(denoise_cmd)) return cmd_denoise(dn, out);
    if (app.got_subcommand(metrics_cmd)) return cmd_metrics(mt, out);
    if (app.got_subcommand(bench_cmd)) return cmd_bench(bn, out, err);
  } catch (const NumericError& e) {
    err << "numeric failure: " << e.what() << '\n';
    return 2;
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    if (app.got_subcommand(degrade_cmd) && std::string(e.what()).find("blur") != std::string::npos)
      err << degrade_cmd->help();
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

}  // namespace pdeblur::cli
