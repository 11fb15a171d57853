#include "orlicz/errors.hpp"
#include "orlicz/mesh.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

namespace orlicz {
namespace {

TEST(IntervalMesh, NodesAndBoundary) {
    const auto m = build_interval_mesh(0.0, 1.0, 4);
    ASSERT_EQ(m->num_nodes(), 5u);
    ASSERT_EQ(m->num_elements(), 4u);
    const double expected[] = {0.0, 0.25, 0.5, 0.75, 1.0};
    for (std::size_t i = 0; i < 5; ++i) EXPECT_DOUBLE_EQ(m->node(i)[0], expected[i]);
    EXPECT_EQ(m->boundary_nodes(), (std::vector<int>{0, 4}));
    EXPECT_EQ(m->interior_nodes(), (std::vector<int>{1, 2, 3}));
    EXPECT_DOUBLE_EQ(m->diameter(), 1.0);
}

TEST(IntervalMesh, MeasuresSumToLength) {
    for (const int n : {2, 3, 7, 64, 1000}) {
        const auto m = build_interval_mesh(0.0, 1.0, n);
        EXPECT_NEAR(m->total_measure(), 1.0, 1e-14) << n;
    }
    EXPECT_DOUBLE_EQ(build_interval_mesh(-1.0, 2.0, 3)->diameter(), 3.0);
}

TEST(IntervalMesh, Arguments) {
    EXPECT_THROW((void)build_interval_mesh(0.0, 1.0, 1), ArgumentError);
    EXPECT_THROW((void)build_interval_mesh(1.0, 0.0, 4), ArgumentError);
}

TEST(RectMesh, Counting) {
    const auto m = build_rect_mesh(1.0, 1.0, 2, 2);
    EXPECT_EQ(m->num_nodes(), 9u);
    EXPECT_EQ(m->num_elements(), 8u);
    EXPECT_EQ(m->boundary_nodes().size(), 8u);
    EXPECT_EQ(m->interior_nodes(), (std::vector<int>{4}));
    EXPECT_NEAR(m->diameter(), std::sqrt(2.0), 1e-15);
}

TEST(RectMesh, AreaAndBoundaryGeometry) {
    const double lx = 2.5;
    const double ly = 0.7;
    const auto m = build_rect_mesh(lx, ly, 13, 9);
    EXPECT_NEAR(m->total_measure(), lx * ly, 1e-12);
    EXPECT_EQ(m->num_elements(), 13u * 9u * 2u);
    for (const int b : m->boundary_nodes()) {
        const auto& p = m->node(static_cast<std::size_t>(b));
        EXPECT_TRUE(p[0] == 0.0 || p[0] == lx || p[1] == 0.0 || p[1] == ly);
    }
    for (const int i : m->interior_nodes()) {
        const auto& p = m->node(static_cast<std::size_t>(i));
        EXPECT_TRUE(p[0] > 0.0 && p[0] < lx && p[1] > 0.0 && p[1] < ly);
    }
    EXPECT_NEAR(m->diameter(), std::hypot(lx, ly), 1e-15);
}

TEST(RectMesh, LexicographicNumbering) {
    const auto m = build_rect_mesh(1.0, 2.0, 4, 3);
    for (int j = 0; j <= 3; ++j) {
        for (int i = 0; i <= 4; ++i) {
            const auto& p = m->node(static_cast<std::size_t>(i + 5 * j));
            EXPECT_DOUBLE_EQ(p[0], i / 4.0);
            EXPECT_DOUBLE_EQ(p[1], 2.0 * j / 3.0);
        }
    }
}

TEST(RectMesh, NodeCap) {
    EXPECT_THROW((void)build_rect_mesh(1.0, 1.0, 100, 100, 1000), ResourceError);
    EXPECT_NO_THROW((void)build_rect_mesh(1.0, 1.0, 30, 30, 1000));
    EXPECT_THROW((void)build_rect_mesh(1.0, 1.0, 1, 4), ArgumentError);
    EXPECT_THROW((void)build_rect_mesh(0.0, 1.0, 4, 4), ArgumentError);
}

TEST(Gradient, ReproducesLinearFields) {
    const auto line = build_interval_mesh(0.0, 1.0, 7);
    const auto u = Field::interpolate(line, [](double x, double) { return x; });
    for (std::size_t e = 0; e < line->num_elements(); ++e) EXPECT_NEAR(element_gradient(u, e)[0], 1.0, 1e-13);

    const auto rect = build_rect_mesh(1.0, 1.0, 6, 5);
    const auto v = Field::interpolate(rect, [](double, double y) { return y; });
    for (std::size_t e = 0; e < rect->num_elements(); ++e) {
        const auto g = element_gradient(v, e);
        EXPECT_NEAR(g[0], 0.0, 1e-13);
        EXPECT_NEAR(g[1], 1.0, 1e-13);
    }

    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u01(-3.0, 3.0);
    for (int trial = 0; trial < 20; ++trial) {
        const double a = u01(rng);
        const double b = u01(rng);
        const auto w = Field::interpolate(rect, [&](double x, double y) { return a * x + b * y + 0.5; });
        for (std::size_t e = 0; e < rect->num_elements(); ++e) {
            const auto g = element_gradient(w, e);
            EXPECT_NEAR(g[0], a, 1e-12);
            EXPECT_NEAR(g[1], b, 1e-12);
        }
    }
}

TEST(Gradient, DiscreteIntegrationByParts) {
    // sum_e |T_e| grad u . c = 0 for u vanishing on the boundary
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u01(-1.0, 1.0);
    for (const auto& m : {build_interval_mesh(0.0, 2.0, 17), build_rect_mesh(1.5, 1.0, 9, 7)}) {
        Eigen::VectorXd v(static_cast<Eigen::Index>(m->num_nodes()));
        for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = u01(rng);
        for (const int b : m->boundary_nodes()) v[b] = 0.0;
        const Field u(m, v);
        for (int trial = 0; trial < 5; ++trial) {
            const double c0 = u01(rng);
            const double c1 = u01(rng);
            double sum = 0.0;
            for (std::size_t e = 0; e < m->num_elements(); ++e) {
                const auto g = element_gradient(u, e);
                sum += m->measure(e) * (g[0] * c0 + g[1] * c1);
            }
            EXPECT_NEAR(sum, 0.0, 1e-10);
        }
    }
}

TEST(Quadrature, ExactForQuadratics) {
    const auto rect = build_rect_mesh(1.0, 1.0, 5, 4);
    double sum = 0.0;
    for (std::size_t e = 0; e < rect->num_elements(); ++e) {
        for (const auto& qp : rect->quadrature(e)) sum += qp.weight * (qp.x[0] * qp.x[0] + qp.x[0] * qp.x[1]);
    }
    EXPECT_NEAR(sum, 1.0 / 3.0 + 0.25, 1e-14);

    const auto line = build_interval_mesh(0.0, 1.0, 3);
    sum = 0.0;
    for (std::size_t e = 0; e < line->num_elements(); ++e) {
        for (const auto& qp : line->quadrature(e)) sum += qp.weight * std::pow(qp.x[0], 3);
    }
    EXPECT_NEAR(sum, 0.25, 1e-15);  // 2-point Gauss is exact for cubics
}

TEST(Quadrature, PointsAreInterior) {
    const auto rect = build_rect_mesh(1.0, 1.0, 3, 3);
    for (std::size_t e = 0; e < rect->num_elements(); ++e) {
        for (const auto& qp : rect->quadrature(e)) {
            EXPECT_GT(qp.x[0], 0.0);
            EXPECT_GT(qp.x[1], 0.0);
        }
    }
}

TEST(LumpedMass, SumsToMeasure) {
    const auto rect = build_rect_mesh(2.0, 3.0, 8, 5);
    const auto m = rect->lumped_masses();
    double total = 0.0;
    for (const double w : m) total += w;
    EXPECT_NEAR(total, 6.0, 1e-12);
    const auto line = build_interval_mesh(0.0, 1.0, 4);
    const auto ml = line->lumped_masses();
    EXPECT_DOUBLE_EQ(ml[0], 0.125);
    EXPECT_DOUBLE_EQ(ml[2], 0.25);
}

double max_interpolation_error(int n) {
    // max over element centroids of |I_h u - u| for u = x^2 + x y
    const auto m = build_rect_mesh(1.0, 1.0, n, n);
    const auto exact = [](double x, double y) { return x * x + x * y; };
    const auto u = Field::interpolate(m, exact);
    double err = 0.0;
    for (std::size_t e = 0; e < m->num_elements(); ++e) {
        for (const auto& qp : m->quadrature(e)) {
            err = std::max(err, std::abs(u.value_at(e, qp) - exact(qp.x[0], qp.x[1])));
        }
    }
    return err;
}

TEST(Refinement, InterpolationOrderTwo) {
    double prev = max_interpolation_error(8);
    for (const int n : {16, 32, 64}) {
        const double cur = max_interpolation_error(n);
        const double order = std::log2(prev / cur);
        EXPECT_GE(order, 1.8) << n;
        EXPECT_LE(order, 2.2) << n;
        prev = cur;
    }
}

TEST(Field, Validation) {
    const auto m = build_interval_mesh(0.0, 1.0, 4);
    EXPECT_THROW(Field(m, Eigen::VectorXd::Zero(3)), ArgumentError);
    Eigen::VectorXd v = Eigen::VectorXd::Zero(5);
    v[2] = std::nan("");
    EXPECT_THROW(Field(m, v), ValidationError);
}

TEST(Mesh, CsvDump) {
    const auto m = build_rect_mesh(1.0, 1.0, 2, 2);
    const std::string nodes = ::testing::TempDir() + "nodes.csv";
    const std::string elems = ::testing::TempDir() + "elems.csv";
    m->write_csv(nodes, elems);
    std::ifstream in(elems);
    std::string line;
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    EXPECT_EQ(rows, 9);
}

}  // namespace
}  // namespace orlicz
