#include "pdeblur/solver.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "pdeblur/error.hpp"

namespace pdeblur {

void SolverConfig::validate() const {
  if (!(p > 0.0 && p <= 1.0)) throw InputError("p must be in (0,1]");
  if (!(lambda > 0.0)) throw InputError("lambda must be > 0");
  if (!(gamma1 > 0.0)) throw InputError("gamma1 must be > 0");
  if (gamma2 != gamma1) throw InputError("gamma2 must equal gamma1");
  if (!(gamma3 > 0.0)) throw InputError("gamma3 must be > 0");
  if (!(mu >= 0.0)) throw InputError("mu must be >= 0");
  if (!(eps_tol > 0.0)) throw InputError("tolerance must be > 0");
  if (max_iter < 1) throw InputError("max_iter must be >= 1");
  if (!(z_floor > 0.0)) throw InputError("z_floor must be > 0");
  if (!(intensity_scale > 0.0)) throw InputError("intensity_scale must be > 0");
  for (double v : {mu, lambda, p, gamma1, gamma3, eps_tol, z_floor, intensity_scale})
    if (!std::isfinite(v)) throw InputError("solver parameters must be finite");
}

SolverConfig SolverConfig::tv(double lambda) {
  SolverConfig cfg;
  cfg.mu = 0.0;
  cfg.p = 1.0;
  cfg.lambda = lambda;
  return cfg;
}

SolverConfig SolverConfig::l2l1(double lambda) {
  SolverConfig cfg;
  cfg.p = 1.0;
  cfg.lambda = lambda;
  return cfg;
}

SolverConfig SolverConfig::l2lp(double lambda) {
  SolverConfig cfg;
  cfg.lambda = lambda;
  return cfg;
}

void ConvergenceTrace::write_csv(std::ostream& os) const {
  os << "iter,rel_change,res_v,res_w,res_z,energy,ms\n";
  const auto flags = os.flags();
  const auto prec = os.precision();
  os << std::setprecision(10);
  for (const auto& r : records) {
    os << r.iter << ',' << r.rel_change << ',' << r.res_v << ',' << r.res_w << ',' << r.res_z << ','
       << r.energy << ',' << std::setprecision(4) << r.ms << std::setprecision(10) << '\n';
  }
  os.flags(flags);
  os.precision(prec);
}

std::string ConvergenceTrace::to_csv() const {
  std::ostringstream os;
  write_csv(os);
  return os.str();
}

SolverState init_state(const ImageGrid& f, const BlurOperator& blur, const SolverConfig& cfg) {
  f.validate();
  for (double v : f.values())
    if (v < 0.0) throw InputError("observed image must be nonnegative");
  SolverState s;
  s.u = f;
  s.v = ImageGrid(f.height(), f.width());
  s.w = s.v;
  s.z = blur.apply(f);
  for (double& z : s.z.data()) z = std::max(z, cfg.z_floor);
  s.lam1 = ImageGrid(f.height(), f.width());
  s.lam2 = s.lam1;
  s.lam3 = s.lam1;
  return s;
}

ImageGrid update_u(const SolverState& state, const SpectralKernel& kernel, const SolverConfig& cfg) {
  const std::size_t n = state.u.size();
  ImageGrid vx(state.u.height(), state.u.width());
  ImageGrid wy = vx;
  ImageGrid zz = vx;
  for (std::size_t k = 0; k < n; ++k) {
    vx[k] = cfg.gamma1 * state.v[k] - state.lam1[k];
    wy[k] = cfg.gamma2 * state.w[k] - state.lam2[k];
    zz[k] = cfg.gamma3 * state.z[k] - state.lam3[k];
  }
  ImageGrid rhs = grad_x_adjoint(vx);
  rhs += grad_y_adjoint(wy);
  rhs += kernel.blur().apply_adjoint(zz);
  return solve_u_system(kernel, rhs);
}

std::pair<double, double> shrink_p(double rx, double ry, double gamma, double p) noexcept {
  const double r = std::hypot(rx, ry);
  if (r == 0.0) return {0.0, 0.0};
  const double threshold = std::pow(gamma, p - 2.0) * std::pow(r, p - 1.0);
  const double magnitude = std::max(r - threshold, 0.0);
  if (magnitude == 0.0) return {0.0, 0.0};
  return {magnitude * rx / r, magnitude * ry / r};
}

std::pair<ImageGrid, ImageGrid> update_vw(const SolverState& state, const ImageGrid& u_next,
                                          const SolverConfig& cfg) {
  const ImageGrid gx = grad_x(u_next);
  const ImageGrid gy = grad_y(u_next);
  ImageGrid v(u_next.height(), u_next.width());
  ImageGrid w = v;
  for (std::size_t k = 0; k < v.size(); ++k) {
    const double rx = gx[k] + state.lam1[k] / cfg.gamma1;
    const double ry = gy[k] + state.lam2[k] / cfg.gamma2;
    std::tie(v[k], w[k]) = shrink_p(rx, ry, cfg.gamma1, cfg.p);
  }
  return {std::move(v), std::move(w)};
}

double z_root(double blurred_u, double lam3, double f, double lambda, double gamma3) noexcept {
  const double b = blurred_u + lam3 / gamma3 - lambda / gamma3;
  const double c = lambda / gamma3 * f;
  const double disc = std::sqrt(b * b + 4.0 * c);
  // (b + disc)/2 cancels badly for b << 0; use the product of roots there
  if (b >= 0.0) return 0.5 * (b + disc);
  return c == 0.0 ? 0.0 : 2.0 * c / (disc - b);
}

ImageGrid update_z(const SolverState& state, const ImageGrid& blurred_u_next, const ImageGrid& f,
                   const SolverConfig& cfg) {
  ImageGrid z(f.height(), f.width());
  for (std::size_t k = 0; k < z.size(); ++k) {
    if (f[k] < 0.0) throw InputError("observed image must be nonnegative");
    z[k] = std::max(z_root(blurred_u_next[k], state.lam3[k], f[k], cfg.lambda, cfg.gamma3), cfg.z_floor);
  }
  return z;
}

Multipliers update_multipliers(const SolverState& state, const ImageGrid& u_next, const ImageGrid& v_next,
                               const ImageGrid& w_next, const ImageGrid& z_next,
                               const ImageGrid& blurred_u_next, const SolverConfig& cfg) {
  const ImageGrid gx = grad_x(u_next);
  const ImageGrid gy = grad_y(u_next);
  Multipliers m{state.lam1, state.lam2, state.lam3};
  for (std::size_t k = 0; k < gx.size(); ++k) {
    m.lam1[k] += cfg.gamma1 * (gx[k] - v_next[k]);
    m.lam2[k] += cfg.gamma2 * (gy[k] - w_next[k]);
    m.lam3[k] += cfg.gamma3 * (blurred_u_next[k] - z_next[k]);
  }
  return m;
}

double relative_change(const ImageGrid& u_prev, const ImageGrid& u_next) {
  if (!u_prev.same_shape(u_next)) throw InputError("relative_change: dimension mismatch");
  const double denom = norm2(u_prev);
  if (denom == 0.0) throw InputError("relative_change: previous iterate has zero norm");
  double acc = 0.0;
  for (std::size_t k = 0; k < u_prev.size(); ++k) {
    const double d = u_next[k] - u_prev[k];
    acc += d * d;
  }
  return std::sqrt(acc) / denom;
}

namespace {

double energy_with_blurred(const ImageGrid& u, const ImageGrid& blurred_u, const ImageGrid& f,
                           const SolverConfig& cfg) {
  const ImageGrid gx = grad_x(u);
  const ImageGrid gy = grad_y(u);
  double smooth = 0.0, sparse = 0.0, fidelity = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    const double g2 = gx[k] * gx[k] + gy[k] * gy[k];
    smooth += g2;
    sparse += std::pow(std::sqrt(g2), cfg.p);
    const double au = std::max(blurred_u[k], cfg.z_floor);
    fidelity += au - f[k] * std::log(au);
  }
  return 0.5 * cfg.mu * smooth + sparse + cfg.lambda * fidelity;
}

double residual(const ImageGrid& a, const ImageGrid& b) {
  double acc = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = a[k] - b[k];
    acc += d * d;
  }
  return std::sqrt(acc);
}

bool all_finite(const ImageGrid& g) {
  for (double v : g.values())
    if (!std::isfinite(v)) return false;
  return true;
}

}  // namespace

double energy(const ImageGrid& u, const ImageGrid& f, const BlurOperator& blur, const SolverConfig& cfg) {
  return energy_with_blurred(u, blur.apply(u), f, cfg);
}

RunResult run(const ImageGrid& f, const Psf& psf, const SolverConfig& cfg) {
  using Clock = std::chrono::steady_clock;
  cfg.validate();
  f.validate();
  if (max_value(f) <= 0.0) throw InputError("observed image must have a positive pixel");

  const ImageGrid f_unit = f * (1.0 / cfg.intensity_scale);
  const SpectralKernel kernel = build_spectral_kernel(psf, f.height(), f.width(), cfg.mu, cfg.gamma1, cfg.gamma3);
  const BlurOperator& blur = kernel.blur();
  SolverState state = init_state(f_unit, blur, cfg);

  RunResult result;
  while (state.iter < cfg.max_iter) {
    const auto t0 = Clock::now();
    ImageGrid u_next = update_u(state, kernel, cfg);
    auto [v_next, w_next] = update_vw(state, u_next, cfg);
    const ImageGrid au = blur.apply(u_next);
    ImageGrid z_next = update_z(state, au, f_unit, cfg);
    Multipliers m = update_multipliers(state, u_next, v_next, w_next, z_next, au, cfg);

    const int iter = state.iter + 1;
    if (!all_finite(u_next) || !all_finite(z_next) || !all_finite(m.lam1) || !all_finite(m.lam2) ||
        !all_finite(m.lam3))
      throw NumericError("non-finite iterate at iteration " + std::to_string(iter), iter);

    TraceRecord rec;
    rec.iter = iter;
    rec.rel_change = relative_change(state.u, u_next);
    rec.res_v = residual(v_next, grad_x(u_next));
    rec.res_w = residual(w_next, grad_y(u_next));
    rec.res_z = residual(z_next, au);
    rec.energy = energy_with_blurred(u_next, au, f_unit, cfg);

    state.u = std::move(u_next);
    state.v = std::move(v_next);
    state.w = std::move(w_next);
    state.z = std::move(z_next);
    state.lam1 = std::move(m.lam1);
    state.lam2 = std::move(m.lam2);
    state.lam3 = std::move(m.lam3);
    state.iter = iter;

    rec.ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
    result.trace.records.push_back(rec);
    if (rec.rel_change <= cfg.eps_tol) {
      result.converged = true;
      break;
    }
  }

  result.iterations = state.iter;
  result.raw = state.u * cfg.intensity_scale;
  result.restored = clamp(result.raw, 0.0, 255.0);
  return result;
}

}  // namespace pdeblur
