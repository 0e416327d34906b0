#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "pdeblur/image.hpp"
#include "pdeblur/operators.hpp"

namespace pdeblur {

/// Scalar knobs of the l2-lp Poisson model and its augmented Lagrangian.
/// Defaults: p = 1/2, mu = 0.01, gamma1 = gamma2 = 0.5, gamma3 = 30,
/// tolerance 1e-4, 250 iterations. lambda is chosen per image.
///
/// run() iterates on f / intensity_scale, so lambda, the gammas and
/// z_floor refer to unit-range intensities; the result is scaled back.
struct SolverConfig {
  double mu = 0.01;
  double lambda = 6.0;
  double p = 0.5;
  double gamma1 = 0.5;
  double gamma2 = 0.5;
  double gamma3 = 30.0;
  double eps_tol = 1e-4;
  int max_iter = 250;
  double z_floor = 1e-8;
  double intensity_scale = 255.0;

  /// Throws InputError naming the first violated constraint.
  void validate() const;

  /// mu = 0, p = 1.
  static SolverConfig tv(double lambda);
  /// p = 1 with the default mu.
  static SolverConfig l2l1(double lambda);
  /// The default p = 1/2 model.
  static SolverConfig l2lp(double lambda);
};

struct SolverState {
  ImageGrid u, v, w, z;
  ImageGrid lam1, lam2, lam3;
  int iter = 0;
};

struct TraceRecord {
  int iter = 0;
  double rel_change = 0.0;
  double res_v = 0.0;
  double res_w = 0.0;
  double res_z = 0.0;
  double energy = 0.0;
  double ms = 0.0;
};

struct ConvergenceTrace {
  std::vector<TraceRecord> records;

  /// CSV with header iter,rel_change,res_v,res_w,res_z,energy,ms.
  void write_csv(std::ostream& os) const;
  std::string to_csv() const;
};

SolverState init_state(const ImageGrid& f, const BlurOperator& blur, const SolverConfig& cfg);

/// Exact minimizer of the u-subproblem, using v, w, z and the multipliers
/// from the previous iterate.
ImageGrid update_u(const SolverState& state, const SpectralKernel& kernel, const SolverConfig& cfg);

/// p-shrinkage of (grad_x u + lam1/gamma1, grad_y u + lam2/gamma2) with
/// threshold gamma1^(p-2) * r^(p-1), applied to the pixelwise magnitude r.
std::pair<ImageGrid, ImageGrid> update_vw(const SolverState& state, const ImageGrid& u_next,
                                          const SolverConfig& cfg);

/// Scalar form of the shrinkage used by update_vw: (v, w) for a single
/// pixel with inputs (rx, ry).
std::pair<double, double> shrink_p(double rx, double ry, double gamma, double p) noexcept;

/// Positive root of z^2 - b z - (lambda/gamma3) f = 0 with
/// b = A u + lam3/gamma3 - lambda/gamma3, floored at z_floor.
ImageGrid update_z(const SolverState& state, const ImageGrid& blurred_u_next, const ImageGrid& f,
                   const SolverConfig& cfg);

/// Scalar form of update_z.
double z_root(double blurred_u, double lam3, double f, double lambda, double gamma3) noexcept;

struct Multipliers {
  ImageGrid lam1, lam2, lam3;
};

Multipliers update_multipliers(const SolverState& state, const ImageGrid& u_next, const ImageGrid& v_next,
                               const ImageGrid& w_next, const ImageGrid& z_next,
                               const ImageGrid& blurred_u_next, const SolverConfig& cfg);

/// ||u_next - u_prev|| / ||u_prev||.
double relative_change(const ImageGrid& u_prev, const ImageGrid& u_next);

/// mu/2 |grad u|^2 + |grad u|^p + lambda (A u - f log A u), summed over
/// pixels; A u is floored at z_floor before the log.
double energy(const ImageGrid& u, const ImageGrid& f, const BlurOperator& blur, const SolverConfig& cfg);

struct RunResult {
  /// Final iterate clamped to [0, 255].
  ImageGrid restored;
  /// Final iterate as computed.
  ImageGrid raw;
  ConvergenceTrace trace;
  int iterations = 0;
  bool converged = false;
};

/// Alternates update_u, update_vw, update_z and update_multipliers until
/// the relative change drops to eps_tol or max_iter is reached. Throws
/// NumericError if an iterate becomes non-finite. The trace (residuals,
/// energy) is in unit-range intensities.
RunResult run(const ImageGrid& f, const Psf& psf, const SolverConfig& cfg);

}  // namespace pdeblur
