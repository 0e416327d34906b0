#include <gtest/gtest.h>

#include <numeric>
#include <random>

#include "oracles.hpp"
#include "pdeblur/error.hpp"
#include "pdeblur/operators.hpp"

using namespace pdeblur;

namespace {

double max_abs_diff(const ImageGrid& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

double max_abs_diff(const ImageGrid& a, const ImageGrid& b) { return max_abs_diff(a, b.values()); }

void expect_valid_psf(const Psf& psf) {
  EXPECT_EQ(psf.kheight() % 2, 1u);
  EXPECT_EQ(psf.kwidth() % 2, 1u);
  double sum = 0.0;
  for (double w : psf.weights()) {
    EXPECT_GE(w, 0.0);
    sum += w;
  }
  EXPECT_NEAR(sum, 1.0, 1e-12);
}

}  // namespace

TEST(Gradients, ForwardDifferenceExamples) {
  const ImageGrid row(1, 4, std::vector<double>{0, 1, 2, 3});
  EXPECT_EQ(grad_x(row).values(), (std::vector<double>{1, 1, 1, -3}));
  const ImageGrid col(4, 1, std::vector<double>{0, 1, 2, 3});
  EXPECT_EQ(grad_y(col).values(), (std::vector<double>{1, 1, 1, -3}));

  const ImageGrid c(5, 6, 3.25);
  for (const auto& g : {grad_x(c), grad_y(c), grad_x_adjoint(c), grad_y_adjoint(c)})
    for (double v : g.values()) EXPECT_EQ(v, 0.0);
}

TEST(Gradients, TelescopingAndTransposeSymmetry) {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 10; ++t) {
    const ImageGrid u = oracle::random_grid(7, 9, rng);
    const ImageGrid gx = grad_x(u);
    EXPECT_NEAR(std::accumulate(gx.values().begin(), gx.values().end(), 0.0), 0.0, 1e-12);
    EXPECT_EQ(grad_y(transpose(u)), transpose(grad_x(u)));
  }
}

TEST(Gradients, AdjointIdentity) {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 20; ++t) {
    const ImageGrid u = oracle::random_grid(8, 8, rng);
    const ImageGrid v = oracle::random_grid(8, 8, rng);
    EXPECT_NEAR(inner_product(grad_x(u), v), inner_product(u, grad_x_adjoint(v)), 1e-10);
    EXPECT_NEAR(inner_product(grad_y(u), v), inner_product(u, grad_y_adjoint(v)), 1e-10);
  }
}

TEST(Gradients, AdjointMatchesMatrixTranspose) {
  std::mt19937_64 rng(3);
  const ImageGrid v = oracle::random_grid(5, 7, rng);
  EXPECT_LT(max_abs_diff(grad_x_adjoint(v), oracle::dx_t(v.values(), 5, 7)), 1e-14);
  EXPECT_LT(max_abs_diff(grad_y_adjoint(v), oracle::dy_t(v.values(), 5, 7)), 1e-14);
}

TEST(Gradients, NegativeLaplacianIsSumOfNormalOperators) {
  std::mt19937_64 rng(4);
  const ImageGrid u = oracle::random_grid(6, 10, rng);
  const ImageGrid lhs = grad_x_adjoint(grad_x(u)) + grad_y_adjoint(grad_y(u));
  const ImageGrid neg_lap = laplacian(u) * -1.0;
  EXPECT_LT(max_abs_diff(lhs, neg_lap), 1e-12);
  // <u, -Lap u> = |Dx u|^2 + |Dy u|^2
  EXPECT_NEAR(inner_product(u, neg_lap), inner_product(grad_x(u), grad_x(u)) + inner_product(grad_y(u), grad_y(u)),
              1e-10);
}

TEST(Psf, ConstructorInvariants) {
  EXPECT_THROW(Psf(2, 1, {0.5, 0.5}), InputError);
  EXPECT_THROW(Psf(1, 3, {0.5, 0.6, -0.1}), InputError);
  EXPECT_THROW(Psf(1, 3, {0.2, 0.2, 0.2}), InputError);
  EXPECT_THROW(Psf(1, 3, {0.5, 0.5}), InputError);
}

TEST(MotionPsf, DegenerateAndHorizontal) {
  for (double angle : {0.0, 37.0, 90.0}) {
    const Psf p = make_motion_psf(1, angle);
    ASSERT_EQ(p.kheight(), 1u);
    ASSERT_EQ(p.kwidth(), 1u);
    EXPECT_DOUBLE_EQ(p(0, 0), 1.0);
  }
  // obtuse angles pad the grid by one column of eps-weight taps, as fspecial does
  const Psf obtuse = make_motion_psf(1, 135);
  EXPECT_NEAR(obtuse(obtuse.anchor_row(), obtuse.anchor_col()), 1.0, 1e-12);
  const Psf h = make_motion_psf(5, 0);
  ASSERT_EQ(h.kheight(), 1u);
  ASSERT_EQ(h.kwidth(), 5u);
  for (double w : h.weights()) EXPECT_NEAR(w, 0.2, 1e-15);
  EXPECT_THROW(make_motion_psf(0.5, 0), InputError);
}

// fspecial('motion', 10, 90): half = 4.5, so the 11-tap column has full
// coverage on its 9 inner taps and half coverage on the two end taps.
TEST(MotionPsf, VerticalLengthTen) {
  const Psf p = make_motion_psf(10, 90);
  ASSERT_EQ(p.kheight(), 11u);
  ASSERT_EQ(p.kwidth(), 1u);
  expect_valid_psf(p);
  EXPECT_NEAR(p(0, 0), 0.05, 1e-12);
  EXPECT_NEAR(p(10, 0), 0.05, 1e-12);
  for (std::size_t r = 1; r < 10; ++r) EXPECT_NEAR(p(r, 0), 0.1, 1e-12);
}

TEST(MotionPsf, InvariantsAcrossAngles) {
  for (double len : {2.0, 3.0, 7.5, 10.0, 15.0}) {
    for (double angle = -180.0; angle <= 360.0; angle += 15.0) {
      const Psf p = make_motion_psf(len, angle);
      expect_valid_psf(p);
      // a centered segment is symmetric under 180-degree rotation
      for (std::size_t r = 0; r < p.kheight(); ++r)
        for (std::size_t c = 0; c < p.kwidth(); ++c)
          EXPECT_NEAR(p(r, c), p(p.kheight() - 1 - r, p.kwidth() - 1 - c), 1e-14) << len << " " << angle;
    }
  }
  // angles 180 apart describe the same segment
  const Psf a = make_motion_psf(9, 30), b = make_motion_psf(9, 210);
  EXPECT_EQ(a.weights(), b.weights());
}

TEST(GaussianPsf, Shape) {
  const Psf p0 = make_gaussian_psf(0, 2.0);
  ASSERT_EQ(p0.kheight(), 1u);
  EXPECT_DOUBLE_EQ(p0(0, 0), 1.0);

  const Psf p = make_gaussian_psf(3, 3.0);
  ASSERT_EQ(p.kheight(), 7u);
  ASSERT_EQ(p.kwidth(), 7u);
  expect_valid_psf(p);
  for (std::size_t r = 0; r < 7; ++r)
    for (std::size_t c = 0; c < 7; ++c) {
      EXPECT_DOUBLE_EQ(p(r, c), p(6 - r, c));
      EXPECT_DOUBLE_EQ(p(r, c), p(r, 6 - c));
      EXPECT_DOUBLE_EQ(p(r, c), p(c, r));
    }
  // frozen from (sum_{x=-3..3} exp(-x^2/18))^-2 and exp(-1) times that
  EXPECT_NEAR(p(3, 3), 0.030709107640297953, 1e-15);
  EXPECT_NEAR(p(0, 0), 0.01129724935758648, 1e-15);

  EXPECT_THROW(make_gaussian_psf(1, 0.0), InputError);
  EXPECT_THROW(make_gaussian_psf(1, -1.0), InputError);
  EXPECT_THROW(make_gaussian_psf(-1, 1.0), InputError);
}

TEST(Convolution, IdentityAndConstants) {
  std::mt19937_64 rng(5);
  const ImageGrid u = oracle::random_grid(8, 8, rng);
  EXPECT_EQ(convolve_periodic(u, Psf::identity()), u);
  const ImageGrid c(16, 12, 42.0);
  for (const Psf& p : {make_gaussian_psf(2, 1.0), make_motion_psf(7, 30)}) {
    const ImageGrid out = convolve_periodic(c, p);
    for (double v : out.values()) EXPECT_NEAR(v, 42.0, 1e-12);
  }
}

TEST(Convolution, SpectralMatchesSpatialLoop) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> wdist(0.0, 1.0);
  for (int t = 0; t < 10; ++t) {
    std::vector<double> taps(9);
    for (double& w : taps) w = wdist(rng);
    const double s = std::accumulate(taps.begin(), taps.end(), 0.0);
    for (double& w : taps) w /= s;
    const Psf psf(3, 3, taps);
    const ImageGrid u = oracle::random_grid(8, 8, rng);
    const auto expected = oracle::conv(u.values(), 8, 8, psf);
    EXPECT_LT(max_abs_diff(convolve_periodic(u, psf), expected), 1e-10);
    EXPECT_LT(max_abs_diff(convolve_periodic_direct(u, psf), expected), 1e-12);
  }
}

TEST(Convolution, SpectralMatchesSpatialOnLargerGrids) {
  std::mt19937_64 rng(7);
  for (std::size_t n : {8u, 13u, 20u, 32u}) {
    const ImageGrid u = oracle::random_grid(n, n + 3, rng, 0, 255);
    for (const Psf& p : {make_motion_psf(7, 60), make_gaussian_psf(3, 3.0)}) {
      EXPECT_LT(max_abs_diff(convolve_periodic(u, p), convolve_periodic_direct(u, p)), 1e-8);
    }
  }
}

TEST(Convolution, KernelLargerThanImage) {
  EXPECT_THROW(convolve_periodic(ImageGrid(4, 4, 1.0), make_gaussian_psf(3, 1.0)), InputError);
  EXPECT_THROW(convolve_periodic_direct(ImageGrid(4, 4, 1.0), make_gaussian_psf(3, 1.0)), InputError);
}

TEST(BlurOperator, AdjointAndPositivity) {
  std::mt19937_64 rng(8);
  const BlurOperator a(make_motion_psf(6, 20), 12, 10);
  for (int t = 0; t < 10; ++t) {
    const ImageGrid u = oracle::random_grid(12, 10, rng);
    const ImageGrid v = oracle::random_grid(12, 10, rng);
    EXPECT_NEAR(inner_product(a.apply(u), v), inner_product(u, a.apply_adjoint(v)), 1e-10);
    EXPECT_GE(inner_product(a.apply(u), a.apply(u)), 0.0);
    EXPECT_LT(max_abs_diff(a.apply_adjoint(v), oracle::conv_t(v.values(), 12, 10, a.psf())), 1e-10);
  }
  EXPECT_NEAR(a.transfer()[0].real(), 1.0, 1e-12);
  EXPECT_NEAR(a.transfer()[0].imag(), 0.0, 1e-12);
}

TEST(SpectralKernel, DcAndPositivity) {
  const SpectralKernel k = build_spectral_kernel(Psf::identity(), 8, 8, 0.0, 1.0, 1.0);
  EXPECT_NEAR(k.denom()[0], 1.0, 1e-14);

  const SpectralKernel g = build_spectral_kernel(make_gaussian_psf(3, 3.0), 8, 8, 0.01, 0.5, 30.0);
  double min_transfer = 1e300;
  for (const auto& t : g.transfer()) min_transfer = std::min(min_transfer, std::norm(t));
  for (double d : g.denom()) {
    EXPECT_GE(d, 30.0 * min_transfer);
    EXPECT_GT(d, 0.0);
  }
  EXPECT_NEAR(g.denom()[0], 30.0, 1e-10);

  EXPECT_THROW(build_spectral_kernel(Psf::identity(), 8, 8, 0.0, 1.0, 0.0), InputError);
  EXPECT_THROW(build_spectral_kernel(Psf::identity(), 8, 8, -1.0, 1.0, 1.0), InputError);
  EXPECT_THROW(build_spectral_kernel(Psf::identity(), 8, 8, 0.0, 0.0, 1.0), InputError);
}

TEST(SpectralKernel, OperatorMatchesSpatialOracle) {
  std::mt19937_64 rng(9);
  for (std::size_t n : {8u, 15u, 32u}) {
    const Psf psf = make_motion_psf(5, 45);
    const SpectralKernel k = build_spectral_kernel(psf, n, n, 0.01, 0.5, 30.0);
    const ImageGrid u = oracle::random_grid(n, n, rng);
    const auto expected = oracle::normal_operator(u.values(), n, n, psf, 0.01, 0.5, 30.0);
    EXPECT_LT(max_abs_diff(k.apply(u), expected), 1e-8);
  }
}

TEST(SolveUSystem, InvertsForwardOperator) {
  std::mt19937_64 rng(10);
  const Psf psf = make_gaussian_psf(2, 1.5);
  const SpectralKernel k = build_spectral_kernel(psf, 16, 12, 0.01, 0.5, 30.0);
  const ImageGrid u0 = oracle::random_grid(16, 12, rng);
  const ImageGrid rhs(16, 12, oracle::normal_operator(u0.values(), 16, 12, psf, 0.01, 0.5, 30.0));
  EXPECT_LT(max_abs_diff(solve_u_system(k, rhs), u0), 1e-8);
}

TEST(SolveUSystem, MatchesDenseSolve) {
  std::mt19937_64 rng(11);
  const Psf psf = make_motion_psf(3, 30);
  const double mu = 0.01, g1 = 0.5, g3 = 30.0;
  const auto op = [&](const oracle::Grid& x) { return oracle::normal_operator(x, 8, 8, psf, mu, g1, g3); };
  const auto matrix = oracle::assemble(op, 64);
  const SpectralKernel k = build_spectral_kernel(psf, 8, 8, mu, g1, g3);
  for (int t = 0; t < 3; ++t) {
    const ImageGrid rhs = oracle::random_grid(8, 8, rng);
    const auto expected = oracle::dense_solve(matrix, rhs.values());
    const ImageGrid got = solve_u_system(k, rhs);
    double err = 0.0, ref = 0.0;
    for (std::size_t i = 0; i < 64; ++i) {
      err += (got[i] - expected[i]) * (got[i] - expected[i]);
      ref += expected[i] * expected[i];
    }
    EXPECT_LT(std::sqrt(err / ref), 1e-8);
  }
}

TEST(SolveUSystem, ConstantRhsOnlyExcitesDc) {
  const SpectralKernel k = build_spectral_kernel(Psf::identity(), 8, 8, 0.3, 0.5, 4.0);
  const ImageGrid u = solve_u_system(k, ImageGrid(8, 8, 10.0));
  for (double v : u.values()) EXPECT_NEAR(v, 10.0 / 4.0, 1e-12);
  EXPECT_THROW(solve_u_system(k, ImageGrid(8, 7, 1.0)), InputError);
}
