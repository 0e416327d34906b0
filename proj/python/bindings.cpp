#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "pdeblur/degradation.hpp"
#include "pdeblur/error.hpp"
#include "pdeblur/metrics.hpp"
#include "pdeblur/solver.hpp"

namespace py = pybind11;
using namespace pdeblur;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

ImageGrid to_grid(const Array& a) {
  if (a.ndim() != 2) throw InputError("expected a 2-D array");
  const auto h = static_cast<std::size_t>(a.shape(0)), w = static_cast<std::size_t>(a.shape(1));
  return ImageGrid(h, w, std::vector<double>(a.data(), a.data() + h * w));
}

Array to_array(const ImageGrid& g) {
  Array out({g.height(), g.width()});
  std::copy(g.values().begin(), g.values().end(), out.mutable_data());
  return out;
}

Psf to_psf(const Array& k) {
  if (k.ndim() != 2) throw InputError("expected a 2-D kernel");
  const auto h = static_cast<std::size_t>(k.shape(0)), w = static_cast<std::size_t>(k.shape(1));
  return Psf(h, w, std::vector<double>(k.data(), k.data() + h * w));
}

Array psf_array(const Psf& p) {
  Array out({p.kheight(), p.kwidth()});
  std::copy(p.weights().begin(), p.weights().end(), out.mutable_data());
  return out;
}

py::dict trace_dict(const ConvergenceTrace& trace) {
  const auto n = static_cast<py::ssize_t>(trace.records.size());
  py::array_t<int> iter(n);
  py::array_t<double> rel(n), rv(n), rw(n), rz(n), en(n), ms(n);
  for (py::ssize_t k = 0; k < n; ++k) {
    const auto& r = trace.records[k];
    iter.mutable_at(k) = r.iter;
    rel.mutable_at(k) = r.rel_change;
    rv.mutable_at(k) = r.res_v;
    rw.mutable_at(k) = r.res_w;
    rz.mutable_at(k) = r.res_z;
    en.mutable_at(k) = r.energy;
    ms.mutable_at(k) = r.ms;
  }
  py::dict d;
  d["iter"] = iter;
  d["rel_change"] = rel;
  d["res_v"] = rv;
  d["res_w"] = rw;
  d["res_z"] = rz;
  d["energy"] = en;
  d["ms"] = ms;
  return d;
}

}  // namespace

PYBIND11_MODULE(_pdeblur, m) {
  m.doc() = "l2-lp Poisson deblurring: augmented Lagrangian solver, degradation and metrics";

  py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
  py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);

  m.def("make_synthetic", [](std::size_t size) { return to_array(make_synthetic(size)); }, py::arg("size") = 128);
  m.def("load_image", [](const std::string& path) { return to_array(load_image(path)); }, py::arg("path"));
  m.def(
      "save_image", [](const Array& img, const std::string& path) { save_image(to_grid(img), path); },
      py::arg("image"), py::arg("path"));

  m.def("motion_psf", [](double length, double angle) { return psf_array(make_motion_psf(length, angle)); },
        py::arg("length"), py::arg("angle"));
  m.def("gaussian_psf", [](int radius, double sigma) { return psf_array(make_gaussian_psf(radius, sigma)); },
        py::arg("radius"), py::arg("sigma"));
  m.def("blur_psf", [](const std::string& spec) { return psf_array(make_psf(parse_blur(spec))); },
        py::arg("spec"), "Kernel for 'none', 'motion:LEN:ANGLE' or 'gaussian:RADIUS:SIGMA'.");
  m.def(
      "convolve", [](const Array& img, const Array& kernel) { return to_array(convolve_periodic(to_grid(img), to_psf(kernel))); },
      py::arg("image"), py::arg("kernel"), "Circular convolution.");

  m.def(
      "degrade",
      [](const Array& clean, const std::string& blur, double peak, std::uint64_t seed) {
        return to_array(degrade(to_grid(clean), {parse_blur(blur), peak, seed}));
      },
      py::arg("clean"), py::arg("blur") = "none", py::arg("peak") = 255.0, py::arg("seed") = 0);

  py::class_<SolverConfig>(m, "SolverConfig")
      .def(py::init<>())
      .def_readwrite("mu", &SolverConfig::mu)
      .def_readwrite("lam", &SolverConfig::lambda)
      .def_readwrite("p", &SolverConfig::p)
      .def_readwrite("gamma1", &SolverConfig::gamma1)
      .def_readwrite("gamma2", &SolverConfig::gamma2)
      .def_readwrite("gamma3", &SolverConfig::gamma3)
      .def_readwrite("eps_tol", &SolverConfig::eps_tol)
      .def_readwrite("max_iter", &SolverConfig::max_iter)
      .def_readwrite("z_floor", &SolverConfig::z_floor)
      .def_readwrite("intensity_scale", &SolverConfig::intensity_scale)
      .def("validate", &SolverConfig::validate)
      .def_static("tv", &SolverConfig::tv, py::arg("lam"))
      .def_static("l2l1", &SolverConfig::l2l1, py::arg("lam"))
      .def_static("l2lp", &SolverConfig::l2lp, py::arg("lam"))
      .def("__repr__", [](const SolverConfig& c) {
        return "SolverConfig(mu=" + std::to_string(c.mu) + ", lam=" + std::to_string(c.lambda) +
               ", p=" + std::to_string(c.p) + ", gamma1=" + std::to_string(c.gamma1) +
               ", gamma3=" + std::to_string(c.gamma3) + ")";
      });

  m.def(
      "run",
      [](const Array& observed, const Array& kernel, const SolverConfig& cfg) {
        const ImageGrid f = to_grid(observed);
        const Psf psf = to_psf(kernel);
        RunResult r;
        {
          py::gil_scoped_release release;
          r = run(f, psf, cfg);
        }
        py::dict out;
        out["restored"] = to_array(r.restored);
        out["raw"] = to_array(r.raw);
        out["iterations"] = r.iterations;
        out["converged"] = r.converged;
        out["trace"] = trace_dict(r.trace);
        return out;
      },
      py::arg("observed"), py::arg("kernel"), py::arg("config"),
      "Runs the solver; returns restored, raw, iterations, converged and the per-iteration trace.");

  m.def("psnr", [](const Array& u, const Array& ref) { return psnr(to_grid(u), to_grid(ref)); }, py::arg("u"),
        py::arg("ref"));
  m.def("snr", [](const Array& u, const Array& ref) { return snr(to_grid(u), to_grid(ref)); }, py::arg("u"),
        py::arg("ref"));
  m.def(
      "ssim",
      [](const Array& u, const Array& ref, bool global) {
        return ssim(to_grid(u), to_grid(ref), global ? SsimMode::Global : SsimMode::Windowed);
      },
      py::arg("u"), py::arg("ref"), py::arg("global_window") = false);
}
