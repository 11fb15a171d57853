#pragma once

// Interval meshes and structured triangulations of [0, lx] x [0, ly] with the
// P1 primitives used by the norms and the solver.

#include <Eigen/Core>

#include <array>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace orlicz {

/// A point of a quadrature rule on one element.
struct QuadraturePoint {
    std::array<double, 2> x;
    double weight;                    // includes the element measure
    std::array<double, 3> barycentric;  // first dim+1 entries used
};

class Mesh {
public:
    int dimension() const { return dim_; }
    std::size_t num_nodes() const { return nodes_.size(); }
    std::size_t num_elements() const { return measure_.size(); }
    int nodes_per_element() const { return dim_ + 1; }

    /// Coordinates of a node; y = 0 on interval meshes.
    const std::array<double, 2>& node(std::size_t i) const { return nodes_[i]; }
    std::span<const int> element(std::size_t e) const;

    const std::vector<int>& boundary_nodes() const { return boundary_; }
    const std::vector<int>& interior_nodes() const { return interior_; }
    bool is_boundary(std::size_t i) const { return on_boundary_[i] != 0; }

    double diameter() const { return diameter_; }
    double measure(std::size_t e) const { return measure_[e]; }
    double total_measure() const { return total_measure_; }

    /// Gradient of the local hat function `local` on element e.
    const std::array<double, 2>& basis_gradient(std::size_t e, int local) const;

    /// 2-point Gauss on segments, 3-point interior rule on triangles.
    /// Both are exact for quadratics.
    std::vector<QuadraturePoint> quadrature(std::size_t e) const;
    int quadrature_size() const { return dim_ == 1 ? 2 : 3; }

    /// Row-sum lumped mass: each element gives measure / (dim + 1) to its nodes.
    std::vector<double> lumped_masses() const;

    /// Node and element CSV pair.
    void write_csv(const std::string& nodes_path, const std::string& elements_path) const;

    friend std::shared_ptr<const Mesh> build_interval_mesh(double a, double b, int n);
    friend std::shared_ptr<const Mesh> build_rect_mesh(double lx, double ly, int nx, int ny,
                                                       std::size_t max_nodes);

private:
    Mesh() = default;
    void finalize();

    int dim_ = 1;
    std::vector<std::array<double, 2>> nodes_;
    std::vector<int> connectivity_;
    std::vector<int> boundary_;
    std::vector<int> interior_;
    std::vector<char> on_boundary_;
    std::vector<double> measure_;
    std::vector<std::array<double, 2>> gradients_;  // (dim + 1) per element
    double diameter_ = 0.0;
    double total_measure_ = 0.0;
};

inline constexpr std::size_t kDefaultMaxNodes = 4'000'000;

/// n uniform segments of [a, b].
std::shared_ptr<const Mesh> build_interval_mesh(double a, double b, int n);

/// nx x ny cells of [0, lx] x [0, ly], each split along the diagonal
/// (i, j)-(i+1, j+1). Nodes are numbered i + (nx + 1) j.
std::shared_ptr<const Mesh> build_rect_mesh(double lx, double ly, int nx, int ny,
                                            std::size_t max_nodes = kDefaultMaxNodes);

/// Nodal values on a mesh.
class Field {
public:
    Field(std::shared_ptr<const Mesh> mesh, Eigen::VectorXd values);
    static Field zeros(std::shared_ptr<const Mesh> mesh);
    static Field interpolate(std::shared_ptr<const Mesh> mesh,
                             const std::function<double(double, double)>& fn);

    const Mesh& mesh() const { return *mesh_; }
    const std::shared_ptr<const Mesh>& mesh_ptr() const { return mesh_; }
    const Eigen::VectorXd& values() const { return values_; }
    double operator[](std::size_t i) const { return values_[static_cast<Eigen::Index>(i)]; }

    /// P1 value at a quadrature point of element e.
    double value_at(std::size_t e, const QuadraturePoint& qp) const;

private:
    std::shared_ptr<const Mesh> mesh_;
    Eigen::VectorXd values_;
};

/// Constant P1 gradient of the field on element e (second entry 0 in 1D).
std::array<double, 2> element_gradient(const Field& field, std::size_t e);

/// Euclidean norm of element_gradient.
double element_gradient_norm(const Field& field, std::size_t e);

}  // namespace orlicz
