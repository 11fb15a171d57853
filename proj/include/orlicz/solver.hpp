#pragma once

// Dirichlet problems -div(phi(|grad u|) grad u) = f on P1 meshes, solved by
// minimizing int Phi(|grad u|) - int f u with an eps-regularized damped Newton
// method, and the truncation chain f_n = min(f, n).

#include "orlicz/errors.hpp"
#include "orlicz/mesh.hpp"
#include "orlicz/nfunction.hpp"

#include <Eigen/Core>

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace orlicz {

enum class RhsKind { data_f, growth_g };
enum class GrowthKind { sub_a, sub_power, critical };
enum class IndexSelector { ell, em };

/// Nonlinearity classes g(x, t):
///   sub_a:     a(x) (1 + |t|^(alpha-1))
///   sub_power: C (|t|^(alpha-1) + |t|^(r-1)),  alpha < r < alpha*
///   critical:  C (|t|^(alpha-1) + |t|^(alpha*-1))
/// with alpha = ell or em of the problem's N-function.
struct GrowthSpec {
    GrowthKind kind = GrowthKind::sub_power;
    IndexSelector alpha = IndexSelector::ell;
    std::optional<Field> a;
    double C = 1.0;
    double r = 0.0;
};

class ProblemSpec {
public:
    using Source = std::function<double(double, double)>;

    static ProblemSpec with_source(std::shared_ptr<const Mesh> mesh, NFunction nf, Source f);
    static ProblemSpec with_field(std::shared_ptr<const Mesh> mesh, NFunction nf, Field f);
    static ProblemSpec with_growth(std::shared_ptr<const Mesh> mesh, NFunction nf, GrowthSpec growth);
    /// f given directly at the quadrature points, element by element.
    static ProblemSpec with_quadrature_values(std::shared_ptr<const Mesh> mesh, NFunction nf,
                                              std::vector<double> f_q);

    /// Copy with f replaced by min(f, n).
    [[nodiscard]] ProblemSpec truncated(int n) const;

    const std::shared_ptr<const Mesh>& mesh() const { return mesh_; }
    const NFunction& nf() const { return nf_; }
    RhsKind rhs_kind() const { return rhs_kind_; }
    const std::optional<GrowthSpec>& growth() const { return growth_; }
    std::optional<int> truncation() const { return truncation_; }

    /// f (after truncation) at the quadrature points, element by element.
    const std::vector<double>& source_at_quadrature() const { return f_q_; }
    /// Load vector b_i = int f v_i over all nodes.
    const Eigen::VectorXd& load() const { return load_; }

    /// Exponent alpha of the growth class and g(x, t) at a quadrature point.
    double growth_alpha() const;
    double growth_value(std::size_t e, int q, double t) const;

private:
    ProblemSpec(std::shared_ptr<const Mesh> mesh, NFunction nf);
    void set_source_values(std::vector<double> f_q);

    std::shared_ptr<const Mesh> mesh_;
    NFunction nf_;
    RhsKind rhs_kind_ = RhsKind::data_f;
    std::optional<GrowthSpec> growth_;
    std::optional<int> truncation_;
    std::vector<double> raw_f_q_;
    std::vector<double> f_q_;
    std::vector<double> a_q_;
    Eigen::VectorXd load_;
};

struct SolverOptions {
    /// Residual tolerance; 1e-9 in 1D and 1e-8 in 2D when unset.
    std::optional<double> tol;
    double eps_start = 1e-2;
    double eps_end = 1e-10;
    double eps_factor = 10.0;
    double armijo = 1e-4;
    int max_halvings = 60;
    int max_newton_per_level = 100;
    int picard_max_iter = 50;
    double picard_damping = 0.5;
    double picard_tol = 1e-10;
};

struct IterationRecord {
    int level;
    int iteration;
    double eps;
    double energy;
    double residual;
    double step;
};

struct SolveReport {
    int newton_iterations = 0;
    int continuation_steps = 0;
    int picard_iterations = 0;
    double final_energy = 0.0;
    double residual_dual_norm = 0.0;
    double sup_norm = 0.0;
    double tol = 0.0;
    double eps_final = 0.0;
    bool converged = false;
    std::vector<IterationRecord> log;
};

class NonconvergenceError : public Error {
public:
    NonconvergenceError(const std::string& message, SolveReport partial)
        : Error("phi_solver.nonconvergence", message), partial_(std::move(partial)) {}
    [[nodiscard]] const SolveReport& partial_report() const noexcept { return partial_; }

private:
    SolveReport partial_;
};

/// int W(|grad u|) - int f u, W = Phi for eps = 0 and
/// W(t) = Phi(sqrt(t^2 + eps^2)) - Phi(eps) otherwise.
double energy(const ProblemSpec& problem, const Field& u, double eps = 0.0);

/// Gradient of energy with respect to all nodal values (boundary entries
/// included, they are not eliminated here).
Eigen::VectorXd energy_gradient(const ProblemSpec& problem, const Field& u, double eps = 0.0);

std::pair<Field, SolveReport> solve_dirichlet(const ProblemSpec& problem, const SolverOptions& opts = {});

std::vector<std::pair<Field, SolveReport>> truncated_sequence(const ProblemSpec& problem,
                                                              const std::vector<int>& n_list,
                                                              const SolverOptions& opts = {});

bool monotonicity_check(const std::vector<Field>& solutions, double tol);

/// ||r|| / sqrt(#interior), r_i = int Phi'(|grad u|) grad u / |grad u| . grad v_i - int f v_i.
double weak_residual_norm(const ProblemSpec& problem, const Field& u);

bool positivity_check(const Field& u, double tol);

double default_tolerance(const Mesh& mesh);

}  // namespace orlicz
