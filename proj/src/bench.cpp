#include "pdeblur/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <set>
#include <sstream>

#include "pdeblur/error.hpp"

namespace pdeblur {

void ExperimentSpec::validate() const {
  if (models.empty()) throw InputError("experiment '" + image_label + "' has no models");
  std::set<std::string> labels;
  for (const auto& m : models) {
    if (!labels.insert(m.label).second)
      throw InputError("duplicate model label '" + m.label + "' in experiment '" + image_label + "'");
    m.config.validate();
  }
  if (!(degradation.noise_peak > 0.0)) throw InputError("noise peak must be > 0");
}

ImageGrid load_source(std::string_view source) {
  constexpr std::string_view prefix = "synthetic:";
  if (source.starts_with(prefix)) {
    const std::string size_text(source.substr(prefix.size()));
    std::size_t pos = 0;
    unsigned long size = 0;
    try {
      size = std::stoul(size_text, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos == 0 || pos != size_text.size()) throw InputError("bad synthetic size in '" + std::string(source) + "'");
    return make_synthetic(size);
  }
  return load_image(std::filesystem::path(std::string(source)));
}

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  using Clock = std::chrono::steady_clock;
  spec.validate();
  ExperimentResult result;

  auto fail_all = [&](const std::string& reason) {
    for (const auto& m : spec.models) {
      ExperimentRow row;
      row.image = spec.image_label;
      row.model = m.label;
      row.error = reason;
      result.rows.push_back(std::move(row));
    }
    return result;
  };

  Psf psf = Psf::identity();
  try {
    result.clean = load_source(spec.image_source);
    psf = make_psf(spec.degradation.blur);
    result.observed = degrade(result.clean, spec.degradation);
    result.degraded = assess(result.observed, result.clean);
  } catch (const std::exception& e) {
    return fail_all(e.what());
  }

  for (const auto& m : spec.models) {
    ExperimentRow row;
    row.image = spec.image_label;
    row.model = m.label;
    try {
      const auto t0 = Clock::now();
      RunResult run_result = run(result.observed, psf, m.config);
      const double seconds = std::chrono::duration<double>(Clock::now() - t0).count();
      row.quality = assess(run_result.restored, result.clean);
      row.quality.iterations = run_result.iterations;
      row.quality.cpu_seconds = seconds;
      row.trace = std::move(run_result.trace);
    } catch (const std::exception& e) {
      row.error = e.what();
    }
    result.rows.push_back(std::move(row));
  }
  return result;
}

std::optional<TableFormat> parse_table_format(std::string_view name) {
  if (name == "csv") return TableFormat::Csv;
  if (name == "markdown" || name == "md") return TableFormat::Markdown;
  return std::nullopt;
}

namespace {

std::string fixed(double v, int digits) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::vector<std::string> format_row(const ExperimentRow& r) {
  if (!r.error.empty()) return {r.image, r.model, "", "", "", "", ""};
  return {r.image,
          r.model,
          fixed(r.quality.psnr, 2),
          fixed(r.quality.snr, 2),
          fixed(r.quality.ssim, 4),
          std::to_string(r.quality.iterations),
          fixed(r.quality.cpu_seconds, 2)};
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string emit_table(const std::vector<ExperimentRow>& rows, TableFormat format) {
  static const std::vector<std::string> header = {"Image", "Model", "PSNR", "SNR", "SSIM", "Iterations", "CPU"};
  std::ostringstream os;
  auto emit_line = [&](const std::vector<std::string>& cells) {
    if (format == TableFormat::Csv) {
      for (std::size_t k = 0; k < cells.size(); ++k) os << (k ? "," : "") << csv_field(cells[k]);
    } else {
      os << '|';
      for (const auto& c : cells) os << ' ' << c << " |";
    }
    os << '\n';
  };
  emit_line(header);
  if (format == TableFormat::Markdown) emit_line({"---", "---", "---:", "---:", "---:", "---:", "---:"});
  for (const auto& r : rows) emit_line(format_row(r));
  return os.str();
}

namespace {

std::optional<std::filesystem::path> find_image(const std::filesystem::path& dir, const std::string& stem) {
  for (const char* ext : {".png", ".pgm", ".PNG", ".PGM"}) {
    auto p = dir / (stem + ext);
    if (std::filesystem::exists(p)) return p;
  }
  return std::nullopt;
}

std::vector<ModelSpec> preset_models(double lambda, double gamma3) {
  std::vector<ModelSpec> models = {{"TV", SolverConfig::tv(lambda)},
                                   {"l2-l1", SolverConfig::l2l1(lambda)},
                                   {"Our (p=1/2)", SolverConfig::l2lp(lambda)}};
  for (auto& m : models) m.config.gamma3 = gamma3;
  return models;
}

}  // namespace

BenchPlan make_preset(std::string_view name, const std::filesystem::path& image_dir) {
  struct Cell {
    const char* label;
    const char* stem;  // nullptr: synthetic
    double lambda;
    double gamma3;
  };
  BlurSpec blur;
  std::vector<Cell> cells;
  if (name == "table1") {
    blur = NoBlur{};
    cells = {{"Synthetic", nullptr, 6.0, 30.0}, {"Lena", "lena", 7.0, 30.0}, {"Peppers", "peppers", 5.0, 30.0}};
  } else if (name == "table2") {
    blur = MotionBlur{10.0, 90.0};
    cells = {{"Synthetic", nullptr, 8.0, 30.0}, {"Lena", "lena", 8.0, 30.0}, {"Peppers", "peppers", 10.0, 30.0}};
  } else if (name == "table3") {
    blur = GaussianBlur{3, 3.0};
    cells = {{"Synthetic", nullptr, 8.0, 30.0}, {"Lena", "lena", 6.0, 30.0}, {"Peppers", "peppers", 6.0, 25.0}};
  } else {
    throw InputError("unknown preset '" + std::string(name) + "' (expected table1, table2 or table3)");
  }

  BenchPlan plan;
  for (const auto& c : cells) {
    ExperimentSpec spec;
    spec.image_label = c.label;
    if (c.stem == nullptr) {
      spec.image_source = "synthetic:128";
    } else {
      auto path = find_image(image_dir, c.stem);
      if (!path) {
        plan.warnings.push_back("warning: " + std::string(c.label) + " image (" + c.stem + ".png/.pgm) not found in '" +
                                image_dir.string() + "'; skipping its rows");
        continue;
      }
      spec.image_source = path->string();
    }
    spec.degradation.blur = blur;
    spec.degradation.noise_peak = 255.0;
    spec.degradation.seed = 42;
    spec.models = preset_models(c.lambda, c.gamma3);
    plan.experiments.push_back(std::move(spec));
  }
  return plan;
}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double to_double(const std::string& v, int line) {
  std::size_t pos = 0;
  double d = 0.0;
  try {
    d = std::stod(v, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == 0 || pos != v.size()) throw InputError("line " + std::to_string(line) + ": bad number '" + v + "'");
  return d;
}

struct PendingModel {
  std::string label;
  std::vector<std::pair<std::string, std::string>> overrides;
  int line = 0;
};

struct PendingCell {
  ExperimentSpec spec;
  std::optional<double> lambda;
  std::vector<PendingModel> models;
  bool touched = false;
};

ExperimentSpec finish_cell(PendingCell& cell) {
  ExperimentSpec spec = std::move(cell.spec);
  if (spec.image_source.empty()) throw InputError("experiment without an 'image' key");
  if (spec.image_label.empty()) spec.image_label = spec.image_source;
  for (const auto& pm : cell.models) {
    const auto base_it = std::find_if(pm.overrides.begin(), pm.overrides.end(),
                                      [](const auto& kv) { return kv.first == "base"; });
    const std::string base = base_it == pm.overrides.end() ? "our" : base_it->second;
    const double lambda = cell.lambda.value_or(SolverConfig{}.lambda);
    SolverConfig cfg;
    if (base == "tv") cfg = SolverConfig::tv(lambda);
    else if (base == "l2l1") cfg = SolverConfig::l2l1(lambda);
    else if (base == "our") cfg = SolverConfig::l2lp(lambda);
    else throw InputError("line " + std::to_string(pm.line) + ": unknown model base '" + base + "'");

    for (const auto& [key, value] : pm.overrides) {
      if (key == "base") continue;
      if (key == "mu") cfg.mu = to_double(value, pm.line);
      else if (key == "lambda") cfg.lambda = to_double(value, pm.line);
      else if (key == "p") cfg.p = to_double(value, pm.line);
      else if (key == "gamma1") cfg.gamma1 = cfg.gamma2 = to_double(value, pm.line);
      else if (key == "gamma3") cfg.gamma3 = to_double(value, pm.line);
      else if (key == "tol") cfg.eps_tol = to_double(value, pm.line);
      else if (key == "max_iter") cfg.max_iter = static_cast<int>(to_double(value, pm.line));
      else throw InputError("line " + std::to_string(pm.line) + ": unknown model key '" + key + "'");
    }
    spec.models.push_back({pm.label, cfg});
  }
  spec.validate();
  return spec;
}

}  // namespace

BenchPlan parse_spec(std::istream& in) {
  BenchPlan plan;
  PendingCell cell;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw.substr(0, raw.find('#')));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line != "[experiment]") throw InputError("line " + std::to_string(line_no) + ": unknown section " + line);
      if (cell.touched) plan.experiments.push_back(finish_cell(cell));
      cell = PendingCell{};
      cell.touched = true;
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw InputError("line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    cell.touched = true;
    if (key == "image") {
      cell.spec.image_source = value;
    } else if (key == "label") {
      cell.spec.image_label = value;
    } else if (key == "blur") {
      cell.spec.degradation.blur = parse_blur(value);
    } else if (key == "peak") {
      cell.spec.degradation.noise_peak = to_double(value, line_no);
    } else if (key == "seed") {
      std::size_t pos = 0;
      try {
        cell.spec.degradation.seed = std::stoull(value, &pos);
      } catch (const std::exception&) {
        pos = 0;
      }
      if (pos == 0 || pos != value.size()) throw InputError("line " + std::to_string(line_no) + ": bad seed");
    } else if (key == "lambda") {
      cell.lambda = to_double(value, line_no);
    } else if (key == "model") {
      std::istringstream tokens(value);
      PendingModel pm;
      pm.line = line_no;
      if (!(tokens >> pm.label)) throw InputError("line " + std::to_string(line_no) + ": model needs a label");
      std::string tok;
      while (tokens >> tok) {
        const auto e = tok.find('=');
        if (e == std::string::npos || e == 0)
          throw InputError("line " + std::to_string(line_no) + ": expected key=value, got '" + tok + "'");
        pm.overrides.emplace_back(tok.substr(0, e), tok.substr(e + 1));
      }
      cell.models.push_back(std::move(pm));
    } else {
      throw InputError("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
  }
  if (cell.touched) plan.experiments.push_back(finish_cell(cell));
  if (plan.experiments.empty()) throw InputError("spec defines no experiments");
  return plan;
}

BenchPlan parse_spec_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open spec file " + path.string());
  return parse_spec(in);
}

}  // namespace pdeblur
