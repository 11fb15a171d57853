#include "orlicz/errors.hpp"
#include "orlicz/norms.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

namespace orlicz {
namespace {

Field random_field(const std::shared_ptr<const Mesh>& m, std::mt19937_64& rng, bool zero_boundary) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_real_distribution<double> decades(-2.0, 2.0);
    const double amp = std::pow(10.0, decades(rng));
    Eigen::VectorXd v(static_cast<Eigen::Index>(m->num_nodes()));
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = amp * u(rng);
    if (zero_boundary) {
        for (const int b : m->boundary_nodes()) v[b] = 0.0;
    }
    return {m, v};
}

TEST(Modular, ClosedForms) {
    const auto line = build_interval_mesh(0.0, 1.0, 10);
    const auto half_square = NFunction::power(2.0, 3);
    EXPECT_EQ(modular(Field::zeros(line), half_square), 0.0);
    const auto c = Field::interpolate(line, [](double, double) { return 1.7; });
    EXPECT_NEAR(modular(c, half_square), 1.7 * 1.7 / 2.0, 1e-14);
    const auto x = Field::interpolate(line, [](double x, double) { return x; });
    EXPECT_NEAR(modular(x, half_square), 1.0 / 6.0, 1e-10);
}

TEST(Modular, SizeMismatch) {
    const auto line = build_interval_mesh(0.0, 1.0, 10);
    EXPECT_THROW((void)modular(Eigen::VectorXd::Zero(4), NFunction::power(2.0, 3), line), ArgumentError);
}

TEST(Luxemburg, ClosedForms) {
    const auto line = build_interval_mesh(0.0, 1.0, 10);
    const auto square = NFunction::power(2.0, 3, 2.0);  // t^2
    EXPECT_EQ(luxemburg_norm(Field::zeros(line), square), 0.0);
    const auto x = Field::interpolate(line, [](double x, double) { return x; });
    EXPECT_NEAR(luxemburg_norm(x, square), 1.0 / std::sqrt(3.0), 1e-10);
}

TEST(Luxemburg, MatchesLpForPurePowers) {
    std::mt19937_64 rng(23);
    const auto rect = build_rect_mesh(1.0, 2.0, 12, 10);
    for (const double p : {1.3, 2.0, 3.5, 7.0}) {
        const auto nf = NFunction::power(p, 8, p);  // t^p
        for (int trial = 0; trial < 10; ++trial) {
            const auto u = random_field(rect, rng, false);
            const double lp = lp_norm(u, p);
            EXPECT_NEAR(luxemburg_norm(u, nf), lp, 1e-9 * lp) << p;
        }
    }
}

TEST(Luxemburg, NormModularSandwich) {
    std::mt19937_64 rng(29);
    const auto rect = build_rect_mesh(1.0, 1.0, 10, 10);
    for (const auto& nf : {NFunction::power_sum(1.5, 1.8, 2), NFunction::plasticity(2.0, 1.0, 4),
                           NFunction::elasticity(1.2, 3)}) {
        for (int trial = 0; trial < 100; ++trial) {
            const auto u = random_field(rect, rng, false);
            const double norm = luxemburg_norm(u, nf);
            const double mod = modular(u, nf);
            const double z0 = std::min(std::pow(norm, nf.ell()), std::pow(norm, nf.em()));
            const double z1 = std::max(std::pow(norm, nf.ell()), std::pow(norm, nf.em()));
            EXPECT_LE(z0, mod * (1.0 + 1e-7)) << nf.label();
            EXPECT_LE(mod, z1 * (1.0 + 1e-7)) << nf.label();
        }
    }
}

TEST(Luxemburg, HomogeneityAndTriangle) {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> scale(-20.0, 20.0);
    const auto rect = build_rect_mesh(1.0, 1.0, 8, 8);
    const auto nf = NFunction::power_sum(1.5, 1.8, 2);
    for (int trial = 0; trial < 30; ++trial) {
        const auto u = random_field(rect, rng, false);
        const auto v = random_field(rect, rng, false);
        const double c = scale(rng);
        const double nu = luxemburg_norm(u, nf);
        EXPECT_NEAR(luxemburg_norm(Field(rect, c * u.values()), nf), std::abs(c) * nu, 1e-8 * std::abs(c) * nu);
        const double nsum = luxemburg_norm(Field(rect, u.values() + v.values()), nf);
        EXPECT_LE(nsum, nu + luxemburg_norm(v, nf) + 1e-8);
    }
}

TEST(Luxemburg, GradientNormOfLinearField) {
    // |grad u| = 5 everywhere; Phi = t^2 gives ||grad u|| = 5 sqrt(|Omega|)
    const auto rect = build_rect_mesh(2.0, 1.0, 6, 4);
    const auto u = Field::interpolate(rect, [](double x, double y) { return 3.0 * x + 4.0 * y; });
    EXPECT_NEAR(grad_luxemburg_norm(u, NFunction::power(2.0, 3, 2.0)), 5.0 * std::sqrt(2.0), 1e-10);
    EXPECT_NEAR(grad_modular(u, NFunction::power(2.0, 3)), 25.0, 1e-12);
}

TEST(LpNorm, Basics) {
    const auto line = build_interval_mesh(0.0, 1.0, 50);
    const auto x = Field::interpolate(line, [](double x, double) { return -x; });
    EXPECT_NEAR(lp_norm(x, 2.0), 1.0 / std::sqrt(3.0), 1e-12);
    EXPECT_NEAR(lp_norm(x, 1.0), 0.5, 1e-12);
    EXPECT_DOUBLE_EQ(lp_norm(x, std::numeric_limits<double>::infinity()), 1.0);
    EXPECT_DOUBLE_EQ(sup_norm(x), 1.0);
    EXPECT_THROW((void)lp_norm(x, 0.0), ArgumentError);
    // large exponents stay finite and approach the sup
    const auto big = Field(line, 1e200 * x.values());
    EXPECT_TRUE(std::isfinite(lp_norm(big, 40.0)));
}

TEST(NormReport, Fields) {
    const auto line = build_interval_mesh(0.0, 1.0, 10);
    const auto x = Field::interpolate(line, [](double x, double) { return x; });
    const auto r = norm_report(x, NFunction::power(2.0, 3, 2.0), {1.0, 2.0});
    EXPECT_NEAR(r.modular, 1.0 / 3.0, 1e-12);
    EXPECT_NEAR(r.luxemburg, 1.0 / std::sqrt(3.0), 1e-10);
    EXPECT_NEAR(r.grad_luxemburg, 1.0, 1e-10);
    EXPECT_EQ(r.lp_values.size(), 2u);
}

TEST(Poincare, ClosedForms) {
    const auto square = NFunction::power(2.0, 3, 2.0);
    const auto line = build_interval_mesh(0.0, 1.0, 400);
    EXPECT_TRUE(poincare_check(Field::zeros(line), square));
    const auto u = Field::interpolate(line, [](double x, double) { return x * (1.0 - x); });
    const auto r = poincare_report(u, square);
    EXPECT_TRUE(r.holds);
    EXPECT_NEAR(r.lhs, std::sqrt(1.0 / 30.0), 1e-5);
    EXPECT_NEAR(r.rhs, 2.0 * std::sqrt(1.0 / 3.0), 1e-5);
    EXPECT_DOUBLE_EQ(r.diameter, 1.0);
}

TEST(Poincare, RandomFieldsOnSquare) {
    std::mt19937_64 rng(37);
    const auto rect = build_rect_mesh(1.0, 1.0, 32, 32);
    const auto nf = NFunction::power_sum(1.5, 1.8, 2);
    for (int trial = 0; trial < 100; ++trial) {
        ASSERT_TRUE(poincare_check(random_field(rect, rng, true), nf)) << trial;
    }
}

TEST(Poincare, RequiresZeroBoundary) {
    const auto line = build_interval_mesh(0.0, 1.0, 10);
    const auto u = Field::interpolate(line, [](double x, double) { return x; });
    EXPECT_THROW((void)poincare_check(u, NFunction::power(2.0, 3)), PreconditionError);
}

}  // namespace
}  // namespace orlicz
