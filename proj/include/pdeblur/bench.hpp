#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pdeblur/degradation.hpp"
#include "pdeblur/metrics.hpp"
#include "pdeblur/solver.hpp"

namespace pdeblur {

struct ModelSpec {
  std::string label;
  SolverConfig config;
};

/// One table cell: an image, one degradation, several models.
struct ExperimentSpec {
  std::string image_label;
  /// File path, or "synthetic:SIZE".
  std::string image_source;
  DegradationSpec degradation;
  std::vector<ModelSpec> models;

  void validate() const;
};

struct ExperimentRow {
  std::string image;
  std::string model;
  QualityReport quality;
  /// Empty when the row succeeded.
  std::string error;
  ConvergenceTrace trace;
};

struct ExperimentResult {
  std::vector<ExperimentRow> rows;
  /// Degraded input measured against the clean image.
  QualityReport degraded;
  ImageGrid clean;
  ImageGrid observed;
};

/// Resolves "synthetic:SIZE" or loads the file.
ImageGrid load_source(std::string_view source);

/// Degrades the clean image once and runs every model on the same
/// observation. A failing model yields a row with `error` set.
ExperimentResult run_experiment(const ExperimentSpec& spec);

enum class TableFormat { Csv, Markdown };

std::optional<TableFormat> parse_table_format(std::string_view name);

/// Columns Image, Model, PSNR, SNR, SSIM, Iterations, CPU. PSNR/SNR with
/// two decimals, SSIM with four, CPU seconds with two.
std::string emit_table(const std::vector<ExperimentRow>& rows, TableFormat format);

struct BenchPlan {
  std::vector<ExperimentSpec> experiments;
  /// Cells dropped because an image file was not found.
  std::vector<std::string> warnings;
};

/// Preset "table1" (Poisson only), "table2" (motion 10/90), "table3"
/// (Gaussian radius 3, sigma 3). Lena/peppers cells look for
/// lena.{png,pgm} and peppers.{png,pgm} in image_dir and are skipped with
/// a warning when absent.
BenchPlan make_preset(std::string_view name, const std::filesystem::path& image_dir);

/// Parses the flat key-value experiment format:
///
///   # comment
///   [experiment]            # starts a new cell (optional for the first)
///   image  = synthetic:128  # or a file path
///   label  = Synthetic
///   blur   = motion:10:90   # none | motion:LEN:ANGLE | gaussian:RADIUS:SIGMA
///   peak   = 255
///   seed   = 42
///   lambda = 8              # default lambda for models in this cell
///   model  = Ours base=our p=0.5 gamma3=25
///
/// `model` lines take a label followed by key=value overrides. base is
/// tv, l2l1 or our (default our); other keys: mu lambda p gamma1 gamma3
/// tol max_iter.
BenchPlan parse_spec(std::istream& in);
BenchPlan parse_spec_file(const std::filesystem::path& path);

}  // namespace pdeblur
