#include "orlicz/errors.hpp"
#include "orlicz/nfunction.hpp"
#include "orlicz/scalar.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <vector>

namespace orlicz {
namespace {

// Composite trapezoid rule; test-only reference quadrature.
template <typename F>
double trapezoid(F&& f, double a, double b, int panels) {
    const double h = (b - a) / panels;
    double sum = 0.5 * (f(a) + f(b));
    for (int i = 1; i < panels; ++i) sum += f(a + i * h);
    return sum * h;
}

std::vector<NFunction> catalog() {
    return {NFunction::power(1.5, 2), NFunction::power(2.0, 3), NFunction::power(3.0, 4),
            NFunction::power_sum(1.5, 1.8, 2), NFunction::power_sum(2.0, 3.0, 4),
            NFunction::elasticity(1.2, 3), NFunction::plasticity(2.0, 1.0, 4),
            NFunction::plasticity(1.0, 0.5, 2), NFunction::newtonian_fluid(0.5, 1.0, 4)};
}

TEST(BigPhi, ClosedFormPowers) {
    EXPECT_DOUBLE_EQ(NFunction::power(2.0, 3).big_phi(1.0), 0.5);
    EXPECT_NEAR(NFunction::power(3.0, 4).big_phi(2.0), 8.0 / 3.0, 1e-14);
    EXPECT_EQ(NFunction::power(3.0, 4).big_phi(0.0), 0.0);
}

TEST(BigPhi, PlasticityMatchesTrapezoidOracle) {
    const auto nf = NFunction::plasticity(2.0, 1.0, 4);
    // s phi(s) = Phi'(s) = 2 s log(1 + s) + s^2 / (1 + s)
    const double ref = trapezoid([](double s) { return 2.0 * s * std::log1p(s) + s * s / (1.0 + s); },
                                 0.0, 1.0, 1'000'000);
    EXPECT_NEAR(nf.big_phi(1.0), ref, 1e-8);
}

TEST(BigPhi, QuadratureForGeneratorsWithoutClosedForm) {
    const auto nf = NFunction::newtonian_fluid(0.5, 1.0, 4);
    const double ref = trapezoid([](double s) { return std::sqrt(s) * std::asinh(s); }, 0.0, 2.0, 1'000'000);
    EXPECT_NEAR(nf.big_phi(2.0), ref, 1e-8);

    const auto custom = NFunction::from_generator([](double t) { return std::pow(t, 0.5); }, 4);
    EXPECT_NEAR(custom.big_phi(3.0), std::pow(3.0, 2.5) / 2.5, 1e-9);
}

TEST(BigPhi, NegativeGeneratorIsRejected) {
    EXPECT_THROW((void)NFunction::from_generator([](double t) { return t - 0.5; }, 2), ValidationError);
}

TEST(BigPhi, NondecreasingAndNonnegative) {
    for (const auto& nf : catalog()) {
        double prev = 0.0;
        for (const double t : scalar::log_grid(1e-6, 1e4, 200)) {
            const double v = nf.big_phi(t);
            EXPECT_GE(v, prev) << nf.label();
            prev = v;
        }
    }
}

TEST(Generators, DerivativeMatchesCentralDifferences) {
    for (const auto& nf : catalog()) {
        for (const double t : {1e-3, 0.1, 0.7, 1.0, 3.0, 50.0}) {
            const double h = 1e-6 * t;
            const double fd = (nf.phi(t + h) - nf.phi(t - h)) / (2.0 * h);
            EXPECT_NEAR(nf.phi_prime(t), fd, 1e-6 * (std::abs(fd) + nf.phi(t) / t)) << nf.label() << " t=" << t;
        }
    }
}

TEST(Generators, IntegratedIndexBounds) {
    // ell Phi <= t Phi' <= m Phi
    for (const auto& nf : catalog()) {
        for (const double t : scalar::log_grid(1e-6, 1e6, 301)) {
            const double lhs = nf.ell() * nf.big_phi(t);
            const double mid = t * nf.big_phi_prime(t);
            const double rhs = nf.em() * nf.big_phi(t);
            EXPECT_LE(lhs, mid * (1.0 + 1e-8)) << nf.label() << " t=" << t;
            EXPECT_LE(mid, rhs * (1.0 + 1e-8)) << nf.label() << " t=" << t;
        }
    }
}

TEST(Catalog, ParameterRanges) {
    EXPECT_THROW((void)NFunction::power(1.0, 2), ValidationError);
    EXPECT_THROW((void)NFunction::power_sum(2.0, 1.5, 4), ValidationError);
    EXPECT_THROW((void)NFunction::power_sum(2.0, 3.0, 3), ValidationError);  // q < N fails
    EXPECT_THROW((void)NFunction::power_sum(1.5, 3.0, 4), ValidationError);  // q < p* = 2.4 fails
    EXPECT_NO_THROW((void)NFunction::power_sum(1.2, 1.95, 2));
    EXPECT_THROW((void)NFunction::elasticity(3.0, 3), ValidationError);      // gamma < N/(N-2) = 3
    EXPECT_THROW((void)NFunction::plasticity(0.9, 1.0, 4), ValidationError);
    EXPECT_THROW((void)NFunction::newtonian_fluid(1.5, 1.0, 4), ValidationError);
    EXPECT_THROW((void)NFunction::from_catalog("power", {{"p", 2.0}, {"q", 3.0}}, 2), ValidationError);
    EXPECT_THROW((void)NFunction::from_catalog("cubic", {{"p", 2.0}}, 2), ValidationError);
    const auto nf = NFunction::from_catalog("power_sum", {{"p", 2.0}, {"q", 3.0}, {"scale", 2.0}}, 4);
    EXPECT_NEAR(nf.big_phi(1.0), 2.0 * (0.5 + 1.0 / 3.0), 1e-14);
}

TEST(CheckConditions, PowerTwoRatioIsOne) {
    const auto grid = default_index_grid();
    const auto report = check_conditions(NFunction::power(2.0, 3), grid);
    EXPECT_TRUE(report.passes);
    // exact up to central-difference rounding
    EXPECT_NEAR(report.ratio_min, 1.0, 1e-9);
    EXPECT_NEAR(report.ratio_max, 1.0, 1e-9);
}

TEST(CheckConditions, PowerSumRatioRange) {
    const auto grid = default_index_grid();
    const auto report = check_conditions(NFunction::power_sum(2.0, 3.0, 4), grid);
    EXPECT_TRUE(report.passes);
    // symbolic ratio (p-1 + (q-1) t^{q-p}) / (1 + t^{q-p}) sampled on the grid
    double lo = 1e300;
    double hi = -1e300;
    for (const double t : grid) {
        const double r = (1.0 + 2.0 * t) / (1.0 + t);
        lo = std::min(lo, r);
        hi = std::max(hi, r);
    }
    EXPECT_NEAR(report.ratio_min, lo, 1e-6);
    EXPECT_NEAR(report.ratio_max, hi, 1e-6);
    EXPECT_GE(report.ratio_min, 1.0 - 1e-6);
    EXPECT_LE(report.ratio_max, 2.0 + 1e-6);
}

TEST(CheckConditions, ConstantFluxFailsStrictMonotonicity) {
    const auto nf = NFunction::from_generator([](double t) { return 1.0 / t; }, 2);
    const auto report = check_conditions(nf, default_index_grid());
    EXPECT_FALSE(report.phi2);
    EXPECT_FALSE(report.phi1);
    EXPECT_FALSE(report.passes);
}

TEST(CheckConditions, DimensionPartOfPhi3) {
    // p = 3 in N = 2 violates ell < N even though the ratio bounds hold.
    const auto report = check_conditions(NFunction::power(3.0, 2), default_index_grid());
    EXPECT_TRUE(report.phi1);
    EXPECT_TRUE(report.phi2);
    EXPECT_TRUE(report.phi3_ratio);
    EXPECT_FALSE(report.phi3_dimension);
    EXPECT_FALSE(report.passes);
}

TEST(CheckConditions, GridValidation) {
    const auto nf = NFunction::power(2.0, 3);
    EXPECT_THROW((void)check_conditions(nf, scalar::log_grid(1e-4, 1e4, 32)), ArgumentError);
    EXPECT_THROW((void)check_conditions(nf, scalar::log_grid(1e-2, 1e4, 100)), ArgumentError);
    auto grid = default_index_grid();
    std::swap(grid[3], grid[4]);
    EXPECT_THROW((void)check_conditions(nf, grid), ArgumentError);
}

TEST(SimonenkoIndices, Catalog) {
    const auto grid = default_index_grid();
    auto est = simonenko_indices(NFunction::power(3.0, 4), grid);
    EXPECT_DOUBLE_EQ(est.ell_hat, 3.0);
    EXPECT_DOUBLE_EQ(est.em_hat, 3.0);
    EXPECT_NEAR(est.grid_ell, 3.0, 1e-9);
    EXPECT_NEAR(est.grid_em, 3.0, 1e-9);

    est = simonenko_indices(NFunction::power_sum(2.0, 3.0, 4), grid);
    EXPECT_NEAR(est.ell_hat, 2.0, 1e-6);
    EXPECT_NEAR(est.em_hat, 3.0, 1e-6);
    EXPECT_NEAR(est.grid_ell, 2.0, 1e-6);
    EXPECT_NEAR(est.grid_em, 3.0, 1e-6);

    est = simonenko_indices(NFunction::plasticity(2.0, 1.0, 4), grid);
    EXPECT_NEAR(est.ell_hat, 2.0, 1e-3);
    EXPECT_NEAR(est.em_hat, 3.0, 1e-3);
    // The sup is reached at 0; the inf is approached only logarithmically, so
    // at t = 1e8 the grid still sees (2L + 3) / (2L + 1) with L = ln 1e8.
    const double L = std::log(1e8);
    EXPECT_NEAR(est.grid_em, 3.0, 1e-6);
    EXPECT_NEAR(est.grid_ell, 1.0 + (2.0 * L + 3.0) / (2.0 * L + 1.0), 1e-3);
}

TEST(SimonenkoIndices, MeasuredForCustomGenerator) {
    // Same generator as power_sum(2, 3) but opaque to the library.
    const auto nf = NFunction::from_generator([](double t) { return 1.0 + t; }, 4);
    const auto est = simonenko_indices(nf, default_index_grid());
    EXPECT_FALSE(est.closed_form);
    EXPECT_NEAR(est.ell_hat, 2.0, 1e-6);
    EXPECT_NEAR(est.em_hat, 3.0, 1e-6);
}

TEST(SimonenkoIndices, RequiresConditions) {
    const auto nf = NFunction::from_generator([](double t) { return 1.0 / t; }, 2);
    EXPECT_THROW((void)simonenko_indices(nf, default_index_grid()), PreconditionError);
}

TEST(Conjugate, ClosedForms) {
    EXPECT_NEAR(conjugate(NFunction::power(2.0, 3), 1.0), 0.5, 1e-12);
    EXPECT_NEAR(conjugate(NFunction::power(3.0, 4), 1.0), 2.0 / 3.0, 1e-12);
    for (const auto& nf : catalog()) EXPECT_EQ(conjugate(nf, 0.0), 0.0);
    // t^{p'}/p' with p' = 3/2
    EXPECT_NEAR(conjugate(NFunction::power(3.0, 4), 4.0), std::pow(4.0, 1.5) / 1.5, 1e-10);
}

TEST(Conjugate, YoungInequality) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(1e-6, 50.0);
    for (const auto& nf : catalog()) {
        // Slow growth can push the conjugate past double range.
        const double t_cap = nf.big_phi_prime(1e250);
        for (int i = 0; i < 10'000; ++i) {
            const double s = u(rng);
            const double t = std::min(u(rng), t_cap);
            ASSERT_LE(s * t, nf.big_phi(s) + conjugate(nf, t) + 1e-9) << nf.label() << " s=" << s << " t=" << t;
        }
    }
}

TEST(Conjugate, DoubleConjugateOfPowers) {
    for (const double p : {1.5, 2.0, 3.0}) {
        const auto nf = NFunction::power(p, 4);
        for (const double t : {0.3, 1.0, 2.5}) {
            // max_s (t s - conj(s)); maximizer is s = t^{p-1}
            const double s_hi = 4.0 * std::pow(t, p - 1.0) + 1.0;
            const auto g = [&](double s) { return t * s - conjugate(nf, s); };
            const double s_star = scalar::maximize_unimodal(g, 0.0, s_hi);
            EXPECT_NEAR(g(s_star), std::pow(t, p) / p, 1e-6) << "p=" << p << " t=" << t;
        }
    }
}

TEST(SobolevConjugate, PrimitiveOfPowerIsClosedForm) {
    // G(t) = p^{1/p} t^kappa / kappa, kappa = 1/p - 1/N
    const double p = 2.0;
    const int N = 4;
    const double kappa = 1.0 / p - 1.0 / N;
    const auto nf = NFunction::power(p, N);
    for (const double t : {1e-3, 0.5, 1.0, 40.0}) {
        const double exact = std::pow(p, 1.0 / p) * std::pow(t, kappa) / kappa;
        EXPECT_NEAR(sobolev_primitive(nf, t), exact, 1e-9 * exact);
    }
}

TEST(SobolevConjugate, PowerIsHomogeneousOfCriticalDegree) {
    const auto nf = NFunction::power(2.0, 4);
    EXPECT_EQ(sobolev_conjugate(nf, 0.0), 0.0);
    for (const double t : {0.05, 0.3, 1.0, 3.0, 20.0}) {
        EXPECT_NEAR(sobolev_conjugate_log_derivative(nf, t), 4.0, 1e-4);
        const double h = 1e-4 * t;
        const double fd = t * (sobolev_conjugate(nf, t + h) - sobolev_conjugate(nf, t - h)) /
                          (2.0 * h * sobolev_conjugate(nf, t));
        EXPECT_NEAR(fd, 4.0, 1e-4);
    }
    EXPECT_DOUBLE_EQ(sobolev_conjugate(nf, -1.3), sobolev_conjugate(nf, 1.3));
}

TEST(SobolevConjugate, PowerSumRatioWithinCriticalIndices) {
    const auto nf = NFunction::power_sum(1.5, 1.8, 2);
    for (const double t : scalar::log_grid(1e-2, 1e2, 24)) {
        const double r = sobolev_conjugate_log_derivative(nf, t);
        EXPECT_GE(r, 6.0 - 1e-6) << t;
        EXPECT_LE(r, 18.0 + 1e-6) << t;
    }
}

TEST(SobolevConjugate, ZetaSandwichOnRandomInputs) {
    const auto nf = NFunction::power_sum(1.5, 1.8, 2);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.05, 3.0);
    for (int i = 0; i < 40; ++i) {
        const double rho = u(rng);
        const double t = u(rng);
        EXPECT_TRUE(zeta_sandwich(nf.ell_star(), nf.em_star(), sobolev_conjugate(nf, rho),
                                  sobolev_conjugate(nf, rho * t), t, 1e-7))
            << rho << " " << t;
    }
}

TEST(SobolevConjugate, UnsupportedWhenEllIsOne) {
    const auto nf = NFunction::plasticity(1.0, 0.5, 2);
    EXPECT_THROW((void)sobolev_conjugate(nf, 1.0), UnsupportedError);
}

TEST(Delta2, Constants) {
    EXPECT_NEAR(delta2_constant(NFunction::power(2.0, 3), 0.0, 1e4), 4.0, 1e-12);
    EXPECT_NEAR(delta2_constant(NFunction::power(3.0, 4), 0.0, 1e4), 8.0, 1e-12);
    const double c = delta2_constant(NFunction::power_sum(2.0, 3.0, 4), 0.0, 1e8);
    EXPECT_GE(c, 4.0);
    EXPECT_LE(c, 8.0);
    EXPECT_NEAR(c, 8.0, 1e-6);
    // Phi(2t)/Phi(t) is increasing for power_sum: the sup on [t0, 10] sits at t = 10.
    const auto ps = NFunction::power_sum(2.0, 3.0, 4);
    EXPECT_NEAR(delta2_constant(ps, 0.0, 10.0), ps.big_phi(20.0) / ps.big_phi(10.0), 1e-12);
    EXPECT_THROW((void)delta2_constant(ps, 5.0, 1.0), ArgumentError);
}

TEST(Zeta, Sandwich) {
    const auto p2 = NFunction::power(2.0, 3);
    EXPECT_TRUE(zeta_bounds_check(p2, 1.7, 0.3));
    EXPECT_TRUE(zeta_bounds_check(p2, 0.2, 9.0));
    EXPECT_TRUE(zeta_bounds_check(NFunction::power_sum(2.0, 3.0, 4), 2.0, 0.5));

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(1e-9, 10.0);
    for (const auto& nf : catalog()) {
        for (int i = 0; i < 10'000; ++i) {
            const double rho = u(rng);
            const double t = u(rng);
            ASSERT_TRUE(zeta_bounds_check(nf, rho, t)) << nf.label() << " " << rho << " " << t;
        }
    }
}

TEST(Zeta, DetectsViolation) {
    // Phi(rho t) for t^4 is not below t^3 Phi(rho) when t > 1.
    EXPECT_FALSE(zeta_sandwich(2.0, 3.0, 1.0, std::pow(2.0, 4.0), 2.0));
}

TEST(HSmp, Values) {
    EXPECT_NEAR(h_smp(NFunction::power(2.0, 3), 1.0), 0.5, 1e-14);
    EXPECT_NEAR(h_smp(NFunction::power(3.0, 4), 2.0), 16.0 / 3.0, 1e-13);
    for (const auto& nf : catalog()) {
        EXPECT_EQ(h_smp(nf, 0.0), 0.0);
        double prev = 0.0;
        for (const double t : scalar::log_grid(1e-4, 1e4, 100)) {
            const double h = h_smp(nf, t);
            EXPECT_GE(h, -1e-12 * nf.big_phi(t)) << nf.label();
            EXPECT_GE(h, prev * (1.0 - 1e-10)) << nf.label();
            prev = h;
        }
    }
}

TEST(Equivalence, ScaledPower) {
    const auto report = equivalence_check(NFunction::power(2.0, 3, 3.0), NFunction::power(2.0, 3),
                                          default_index_grid());
    EXPECT_TRUE(report.equivalent);
    EXPECT_NEAR(report.c1, 3.0, 1e-12);
    EXPECT_NEAR(report.c2, 3.0, 1e-12);
    EXPECT_EQ(report.t0, 1.0);
}

TEST(Equivalence, PowerSumAgainstLeadingPower) {
    const auto report =
        equivalence_check(NFunction::power_sum(2.0, 3.0, 4), NFunction::power(3.0, 4), default_index_grid());
    EXPECT_TRUE(report.equivalent);
    // ratio 1 + 1.5/t on grid points >= 1
    const auto grid = default_index_grid();
    const double first = *std::lower_bound(grid.begin(), grid.end(), 1.0);
    EXPECT_NEAR(report.c2, 1.0 + 1.5 / first, 1e-12);
    EXPECT_NEAR(report.c1, 1.0, 1e-6);
}

TEST(Equivalence, PlasticityIsNotEquivalentToPower) {
    const auto report =
        equivalence_check(NFunction::plasticity(2.0, 1.0, 4), NFunction::power(2.0, 4), default_index_grid());
    EXPECT_FALSE(report.equivalent);
}

TEST(Equivalence, NumericRouteAgreesWithAsymptotics) {
    const auto grid = default_index_grid();
    const auto ps = NFunction::from_generator([](double t) { return std::pow(t, -0.5) + std::pow(t, -0.2); }, 2);
    const auto t18 = NFunction::power(1.8, 2, 1.8);  // t^1.8
    auto report = equivalence_check(ps, t18, grid);
    EXPECT_EQ(report.method, "numeric");
    EXPECT_TRUE(report.equivalent);

    const auto plast = NFunction::from_generator(
        [](double t) { return 2.0 * std::log1p(t) + t / (1.0 + t); }, 4);
    report = equivalence_check(plast, NFunction::power(2.0, 4), grid);
    EXPECT_EQ(report.method, "numeric");
    EXPECT_FALSE(report.equivalent);

    report = equivalence_check(NFunction::from_generator([](double) { return 1.0; }, 4),
                               NFunction::power(3.0, 4), grid);
    EXPECT_FALSE(report.equivalent);
}

TEST(Tabulated, ReproducesSampledPower) {
    std::vector<double> t;
    std::vector<double> phi;
    for (const double x : scalar::log_grid(1e-3, 1e3, 40)) {
        t.push_back(x);
        phi.push_back(std::pow(x, 0.5));
    }
    const auto nf = NFunction::from_table(t, phi, 4);
    EXPECT_NEAR(nf.ell(), 2.5, 1e-12);
    EXPECT_NEAR(nf.em(), 2.5, 1e-12);
    for (const double x : {1e-5, 0.01, 1.0, 7.0, 1e4}) {
        EXPECT_NEAR(nf.big_phi(x), std::pow(x, 2.5) / 2.5, 1e-10 * std::pow(x, 2.5)) << x;
        EXPECT_NEAR(nf.phi(x), std::sqrt(x), 1e-12 * std::sqrt(x));
    }
    EXPECT_TRUE(check_conditions(nf, default_index_grid()).passes);
}

TEST(Tabulated, FileIngestion) {
    const std::string path = ::testing::TempDir() + "table.txt";
    {
        std::ofstream out(path);
        out << "# t phi\n0.5 0.5\n1.0, 1.0\n2.0 2.0\n\n4.0 4.0\n";
    }
    const auto nf = NFunction::from_table_file(path, 4);
    EXPECT_NEAR(nf.big_phi(3.0), 9.0, 1e-12);  // phi = t, Phi = t^3/3
    {
        std::ofstream out(path);
        out << "1.0 1.0\n0.5 2.0\n";
    }
    EXPECT_THROW((void)NFunction::from_table_file(path, 4), ValidationError);
    {
        std::ofstream out(path);
        out << "1.0 1.0 3.0\n";
    }
    EXPECT_THROW((void)NFunction::from_table_file(path, 4), ValidationError);
    std::remove(path.c_str());
}

TEST(Inverse, RoundTrip) {
    for (const auto& nf : catalog()) {
        for (const double s : {1e-12, 1e-3, 0.5, 1.0, 10.0, 1e6}) {
            const double t = nf.inverse(s);
            EXPECT_NEAR(nf.big_phi(t), s, 1e-11 * s) << nf.label();
        }
        EXPECT_EQ(nf.inverse(0.0), 0.0);
    }
}

}  // namespace
}  // namespace orlicz
