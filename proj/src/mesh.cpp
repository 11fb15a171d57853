#include "orlicz/mesh.hpp"

#include "orlicz/errors.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>

namespace orlicz {

namespace {

constexpr const char* kModule = "mesh_discretize";

}  // namespace

std::span<const int> Mesh::element(std::size_t e) const {
    const auto k = static_cast<std::size_t>(nodes_per_element());
    return {connectivity_.data() + e * k, k};
}

const std::array<double, 2>& Mesh::basis_gradient(std::size_t e, int local) const {
    return gradients_[e * static_cast<std::size_t>(nodes_per_element()) + static_cast<std::size_t>(local)];
}

void Mesh::finalize() {
    const std::size_t k = static_cast<std::size_t>(nodes_per_element());
    const std::size_t ne = connectivity_.size() / k;
    measure_.resize(ne);
    gradients_.resize(ne * k);
    total_measure_ = 0.0;
    for (std::size_t e = 0; e < ne; ++e) {
        const int* c = connectivity_.data() + e * k;
        if (dim_ == 1) {
            const double h = nodes_[c[1]][0] - nodes_[c[0]][0];
            measure_[e] = h;
            gradients_[e * k] = {-1.0 / h, 0.0};
            gradients_[e * k + 1] = {1.0 / h, 0.0};
        } else {
            const auto& p0 = nodes_[c[0]];
            const auto& p1 = nodes_[c[1]];
            const auto& p2 = nodes_[c[2]];
            const double det = (p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]);
            measure_[e] = 0.5 * std::abs(det);
            // grad lambda_i = rot(p_{i+2} - p_{i+1}) / det
            const std::array<const std::array<double, 2>*, 3> p{&p0, &p1, &p2};
            for (std::size_t i = 0; i < 3; ++i) {
                const auto& a = *p[(i + 1) % 3];
                const auto& b = *p[(i + 2) % 3];
                gradients_[e * k + i] = {(a[1] - b[1]) / det, (b[0] - a[0]) / det};
            }
        }
        total_measure_ += measure_[e];
    }
    interior_.clear();
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        if (!on_boundary_[i]) interior_.push_back(static_cast<int>(i));
    }
}

std::vector<QuadraturePoint> Mesh::quadrature(std::size_t e) const {
    const auto c = element(e);
    std::vector<QuadraturePoint> out;
    if (dim_ == 1) {
        const double g = 0.5 / std::sqrt(3.0);
        for (const double l1 : {0.5 - g, 0.5 + g}) {
            const double l0 = 1.0 - l1;
            const double x = l0 * nodes_[c[0]][0] + l1 * nodes_[c[1]][0];
            out.push_back({{x, 0.0}, 0.5 * measure_[e], {l0, l1, 0.0}});
        }
        return out;
    }
    static constexpr std::array<std::array<double, 3>, 3> kBary{
        {{2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0}, {1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0}, {1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0}}};
    for (const auto& l : kBary) {
        std::array<double, 2> x{0.0, 0.0};
        for (int i = 0; i < 3; ++i) {
            x[0] += l[i] * nodes_[c[i]][0];
            x[1] += l[i] * nodes_[c[i]][1];
        }
        out.push_back({x, measure_[e] / 3.0, l});
    }
    return out;
}

std::vector<double> Mesh::lumped_masses() const {
    std::vector<double> m(nodes_.size(), 0.0);
    const double share = 1.0 / nodes_per_element();
    for (std::size_t e = 0; e < num_elements(); ++e) {
        for (const int n : element(e)) m[n] += share * measure_[e];
    }
    return m;
}

void Mesh::write_csv(const std::string& nodes_path, const std::string& elements_path) const {
    std::ofstream nodes(nodes_path);
    std::ofstream elems(elements_path);
    if (!nodes || !elems) throw ResourceError(kModule, "cannot open mesh CSV output");
    nodes << std::setprecision(17) << "node,x,y,boundary\n";
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        nodes << i << ',' << nodes_[i][0] << ',' << nodes_[i][1] << ',' << int(on_boundary_[i]) << '\n';
    }
    elems << (dim_ == 1 ? "element,n0,n1\n" : "element,n0,n1,n2\n");
    for (std::size_t e = 0; e < num_elements(); ++e) {
        elems << e;
        for (const int n : element(e)) elems << ',' << n;
        elems << '\n';
    }
}

std::shared_ptr<const Mesh> build_interval_mesh(double a, double b, int n) {
    if (n < 2) throw ArgumentError(kModule, "build_interval_mesh needs n >= 2");
    if (!(std::isfinite(a) && std::isfinite(b) && a < b)) {
        throw ArgumentError(kModule, "build_interval_mesh needs finite a < b");
    }
    std::shared_ptr<Mesh> m(new Mesh());
    m->dim_ = 1;
    m->nodes_.reserve(static_cast<std::size_t>(n) + 1);
    for (int i = 0; i <= n; ++i) {
        const double x = i == n ? b : a + (b - a) * (static_cast<double>(i) / n);
        m->nodes_.push_back({x, 0.0});
    }
    for (int i = 0; i < n; ++i) {
        m->connectivity_.push_back(i);
        m->connectivity_.push_back(i + 1);
    }
    m->on_boundary_.assign(static_cast<std::size_t>(n) + 1, 0);
    m->on_boundary_.front() = m->on_boundary_.back() = 1;
    m->boundary_ = {0, n};
    m->diameter_ = b - a;
    m->finalize();
    return m;
}

std::shared_ptr<const Mesh> build_rect_mesh(double lx, double ly, int nx, int ny, std::size_t max_nodes) {
    if (!(lx > 0.0 && ly > 0.0 && std::isfinite(lx) && std::isfinite(ly))) {
        throw ArgumentError(kModule, "build_rect_mesh needs positive finite sides");
    }
    if (nx < 2 || ny < 2) throw ArgumentError(kModule, "build_rect_mesh needs nx, ny >= 2");
    const auto count = (static_cast<unsigned long long>(nx) + 1) * (static_cast<unsigned long long>(ny) + 1);
    if (count > max_nodes || count > static_cast<unsigned long long>(std::numeric_limits<int>::max())) {
        throw ResourceError(kModule, "build_rect_mesh: node count " + std::to_string(count) +
                                         " exceeds cap " + std::to_string(max_nodes));
    }
    std::shared_ptr<Mesh> m(new Mesh());
    m->dim_ = 2;
    const int sx = nx + 1;
    m->nodes_.reserve(count);
    m->on_boundary_.reserve(count);
    for (int j = 0; j <= ny; ++j) {
        const double y = j == ny ? ly : ly * (static_cast<double>(j) / ny);
        for (int i = 0; i <= nx; ++i) {
            const double x = i == nx ? lx : lx * (static_cast<double>(i) / nx);
            m->nodes_.push_back({x, y});
            const bool edge = i == 0 || j == 0 || i == nx || j == ny;
            m->on_boundary_.push_back(edge ? 1 : 0);
            if (edge) m->boundary_.push_back(i + sx * j);
        }
    }
    m->connectivity_.reserve(static_cast<std::size_t>(nx) * ny * 6);
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const int n00 = i + sx * j;
            const int n10 = n00 + 1;
            const int n01 = n00 + sx;
            const int n11 = n01 + 1;
            for (const int n : {n00, n10, n11, n00, n11, n01}) m->connectivity_.push_back(n);
        }
    }
    m->diameter_ = std::hypot(lx, ly);
    m->finalize();
    return m;
}

Field::Field(std::shared_ptr<const Mesh> mesh, Eigen::VectorXd values)
    : mesh_(std::move(mesh)), values_(std::move(values)) {
    if (!mesh_) throw ArgumentError(kModule, "Field needs a mesh");
    if (static_cast<std::size_t>(values_.size()) != mesh_->num_nodes()) {
        throw ArgumentError(kModule, "Field size " + std::to_string(values_.size()) + " does not match " +
                                         std::to_string(mesh_->num_nodes()) + " nodes");
    }
    if (!values_.allFinite()) throw ValidationError(kModule, "Field values must be finite");
}

Field Field::zeros(std::shared_ptr<const Mesh> mesh) {
    const auto n = static_cast<Eigen::Index>(mesh->num_nodes());
    return {std::move(mesh), Eigen::VectorXd::Zero(n)};
}

Field Field::interpolate(std::shared_ptr<const Mesh> mesh, const std::function<double(double, double)>& fn) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(mesh->num_nodes()));
    for (std::size_t i = 0; i < mesh->num_nodes(); ++i) {
        v[static_cast<Eigen::Index>(i)] = fn(mesh->node(i)[0], mesh->node(i)[1]);
    }
    return {std::move(mesh), std::move(v)};
}

double Field::value_at(std::size_t e, const QuadraturePoint& qp) const {
    const auto c = mesh_->element(e);
    double v = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) v += qp.barycentric[i] * values_[c[i]];
    return v;
}

std::array<double, 2> element_gradient(const Field& field, std::size_t e) {
    const Mesh& m = field.mesh();
    if (e >= m.num_elements()) throw ArgumentError(kModule, "element index out of range");
    const auto c = m.element(e);
    std::array<double, 2> g{0.0, 0.0};
    for (int i = 0; i < m.nodes_per_element(); ++i) {
        const auto& b = m.basis_gradient(e, i);
        const double u = field[static_cast<std::size_t>(c[static_cast<std::size_t>(i)])];
        g[0] += u * b[0];
        g[1] += u * b[1];
    }
    return g;
}

double element_gradient_norm(const Field& field, std::size_t e) {
    const auto g = element_gradient(field, e);
    return std::hypot(g[0], g[1]);
}

}  // namespace orlicz
