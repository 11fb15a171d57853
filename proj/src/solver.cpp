#include "orlicz/solver.hpp"

#include "orlicz/norms.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include <algorithm>
#include <cmath>
#include <limits>

namespace orlicz {

namespace {

constexpr const char* kModule = "phi_solver";

using SparseMatrix = Eigen::SparseMatrix<double>;

std::array<double, 2> gradient_of(const Mesh& m, std::size_t e, const Eigen::VectorXd& u) {
    const auto c = m.element(e);
    std::array<double, 2> g{0.0, 0.0};
    for (int i = 0; i < m.nodes_per_element(); ++i) {
        const auto& b = m.basis_gradient(e, i);
        const double ui = u[c[static_cast<std::size_t>(i)]];
        g[0] += ui * b[0];
        g[1] += ui * b[1];
    }
    return g;
}

// Regularized density W and its radial data at |g| = t.
struct Density {
    const NFunction& nf;
    double eps;

    double value(double t) const {
        if (eps == 0.0) return nf.big_phi(t);
        const double r = std::sqrt(t * t + eps * eps);
        return nf.big_phi(r) - nf.big_phi(eps);
    }
    // W'(t) / t, the coefficient multiplying g in the flux.
    double flux_coefficient(double t) const {
        if (eps == 0.0) return t == 0.0 ? 0.0 : nf.big_phi_prime(t) / t;
        return nf.phi(std::sqrt(t * t + eps * eps));
    }
    // d/dt of the flux coefficient divided by t: phi'(r) / r for eps > 0.
    double tangent_coefficient(double t) const {
        const double r = eps == 0.0 ? t : std::sqrt(t * t + eps * eps);
        if (r == 0.0) return 0.0;
        return nf.phi_prime(r) / r;
    }
};

void require_zero_boundary(const ProblemSpec& problem, const Eigen::VectorXd& u, const char* op) {
    if (static_cast<std::size_t>(u.size()) != problem.mesh()->num_nodes()) {
        throw ArgumentError(kModule, std::string(op) + ": field size does not match the problem mesh");
    }
    for (const int b : problem.mesh()->boundary_nodes()) {
        if (u[b] != 0.0) {
            throw PreconditionError(kModule, std::string(op) + ": field is nonzero on boundary node " +
                                                 std::to_string(b));
        }
    }
}

double energy_of(const ProblemSpec& problem, const Eigen::VectorXd& u, double eps, double* magnitude = nullptr) {
    const Mesh& m = *problem.mesh();
    const Density w{problem.nf(), eps};
    double sum = 0.0;
    double mag = 0.0;
    for (std::size_t e = 0; e < m.num_elements(); ++e) {
        const auto g = gradient_of(m, e, u);
        const double term = m.measure(e) * w.value(std::hypot(g[0], g[1]));
        sum += term;
        mag += std::abs(term);
    }
    const double work = problem.load().dot(u);
    if (magnitude) *magnitude = mag + problem.load().cwiseProduct(u).cwiseAbs().sum();
    return sum - work;
}

Eigen::VectorXd gradient_full(const ProblemSpec& problem, const Eigen::VectorXd& u, double eps) {
    const Mesh& m = *problem.mesh();
    const Density w{problem.nf(), eps};
    Eigen::VectorXd grad = -problem.load();
    for (std::size_t e = 0; e < m.num_elements(); ++e) {
        const auto g = gradient_of(m, e, u);
        const double k = m.measure(e) * w.flux_coefficient(std::hypot(g[0], g[1]));
        const auto c = m.element(e);
        for (int i = 0; i < m.nodes_per_element(); ++i) {
            const auto& b = m.basis_gradient(e, i);
            grad[c[static_cast<std::size_t>(i)]] += k * (g[0] * b[0] + g[1] * b[1]);
        }
    }
    return grad;
}

// Boundary unknowns are eliminated; interior index maps nodes to rows.
struct Elimination {
    std::vector<int> row;  // -1 on the boundary
    int n = 0;

    explicit Elimination(const Mesh& m) : row(m.num_nodes(), -1) {
        for (const int i : m.interior_nodes()) row[static_cast<std::size_t>(i)] = n++;
    }

    Eigen::VectorXd restrict(const Eigen::VectorXd& full) const {
        Eigen::VectorXd out(n);
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (row[i] >= 0) out[row[i]] = full[static_cast<Eigen::Index>(i)];
        }
        return out;
    }

    void add_to(Eigen::VectorXd& full, const Eigen::VectorXd& d, double alpha) const {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (row[i] >= 0) full[static_cast<Eigen::Index>(i)] += alpha * d[row[i]];
        }
    }
};

SparseMatrix hessian(const ProblemSpec& problem, const Eigen::VectorXd& u, double eps, const Elimination& elim) {
    const Mesh& m = *problem.mesh();
    const Density w{problem.nf(), eps};
    const int k = m.nodes_per_element();
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(m.num_elements() * static_cast<std::size_t>(k * k));
    for (std::size_t e = 0; e < m.num_elements(); ++e) {
        const auto g = gradient_of(m, e, u);
        const double t = std::hypot(g[0], g[1]);
        const double a = w.flux_coefficient(t);
        const double b = w.tangent_coefficient(t);
        const auto c = m.element(e);
        std::array<double, 3> gb{};
        for (int i = 0; i < k; ++i) {
            const auto& bi = m.basis_gradient(e, i);
            gb[static_cast<std::size_t>(i)] = g[0] * bi[0] + g[1] * bi[1];
        }
        for (int i = 0; i < k; ++i) {
            const int ri = elim.row[static_cast<std::size_t>(c[static_cast<std::size_t>(i)])];
            if (ri < 0) continue;
            const auto& bi = m.basis_gradient(e, i);
            for (int j = 0; j < k; ++j) {
                const int rj = elim.row[static_cast<std::size_t>(c[static_cast<std::size_t>(j)])];
                if (rj < 0) continue;
                const auto& bj = m.basis_gradient(e, j);
                const double v = a * (bi[0] * bj[0] + bi[1] * bj[1]) +
                                 b * gb[static_cast<std::size_t>(i)] * gb[static_cast<std::size_t>(j)];
                triplets.emplace_back(ri, rj, m.measure(e) * v);
            }
        }
    }
    SparseMatrix h(elim.n, elim.n);
    h.setFromTriplets(triplets.begin(), triplets.end());
    return h;
}

double scaled_norm(const Eigen::VectorXd& r, int n) { return n == 0 ? 0.0 : r.norm() / std::sqrt(double(n)); }

std::vector<double> continuation_levels(const SolverOptions& opts) {
    if (!(opts.eps_start > 0.0 && opts.eps_end > 0.0 && opts.eps_end <= opts.eps_start && opts.eps_factor > 1.0)) {
        throw ArgumentError(kModule, "continuation needs 0 < eps_end <= eps_start and eps_factor > 1");
    }
    std::vector<double> levels;
    for (double eps = opts.eps_start; eps > opts.eps_end * (1.0 + 1e-12); eps /= opts.eps_factor) {
        levels.push_back(eps);
    }
    levels.push_back(opts.eps_end);
    return levels;
}

struct Tangent {
    SparseMatrix h;
    Eigen::SimplicialLDLT<SparseMatrix> ldlt;
    bool analyzed = false;
};

// Newton direction, or steepest descent when the factorization fails or the
// direction is not a descent direction.
Eigen::VectorXd direction(Tangent& tangent, const Eigen::VectorXd& grad) {
    if (!tangent.analyzed) {
        tangent.ldlt.analyzePattern(tangent.h);
        tangent.analyzed = true;
    }
    tangent.ldlt.factorize(tangent.h);
    if (tangent.ldlt.info() == Eigen::Success && (tangent.ldlt.vectorD().array() > 0.0).all()) {
        Eigen::VectorXd d = tangent.ldlt.solve(-grad);
        if (d.allFinite() && d.dot(grad) < 0.0) return d;
    }
    return -grad;
}

void validate_nfunction(const NFunction& nf) {
    const auto report = check_conditions(nf, default_index_grid());
    if (!(report.phi1 && report.phi2 && report.phi3_ratio) || !(nf.ell() > 1.0)) {
        throw PreconditionError(kModule, "solve_dirichlet needs (phi1)-(phi3) with ell > 1 for " + nf.label());
    }
}

std::pair<Field, SolveReport> solve_source(const ProblemSpec& problem, const SolverOptions& opts,
                                           Eigen::VectorXd u) {
    const Mesh& m = *problem.mesh();
    const Elimination elim(m);
    SolveReport report;
    report.tol = opts.tol.value_or(default_tolerance(m));
    const auto levels = continuation_levels(opts);
    Tangent tangent;

    for (std::size_t level = 0; level < levels.size(); ++level) {
        const double eps = levels[level];
        report.continuation_steps = static_cast<int>(level) + 1;
        report.eps_final = eps;
        Eigen::VectorXd g = elim.restrict(gradient_full(problem, u, eps));
        double res = scaled_norm(g, elim.n);
        double magnitude = 0.0;
        double e0 = energy_of(problem, u, eps, &magnitude);
        report.log.push_back({static_cast<int>(level), 0, eps, e0, res, 0.0});
        for (int it = 1; it <= opts.max_newton_per_level && res > report.tol; ++it) {
            tangent.h = hessian(problem, u, eps, elim);
            const Eigen::VectorXd d = direction(tangent, g);
            const double slope = g.dot(d);
            // Below this the energy difference is rounding noise.
            const bool flat = -slope <= 64.0 * std::numeric_limits<double>::epsilon() * magnitude;
            double alpha = 1.0;
            bool accepted = false;
            Eigen::VectorXd trial = u;
            for (int halving = 0; halving <= opts.max_halvings; ++halving) {
                trial = u;
                elim.add_to(trial, d, alpha);
                if (flat) {
                    const Eigen::VectorXd gt = elim.restrict(gradient_full(problem, trial, eps));
                    if (scaled_norm(gt, elim.n) < res) {
                        accepted = true;
                        break;
                    }
                } else {
                    const double et = energy_of(problem, trial, eps);
                    if (std::isfinite(et) && et <= e0 + opts.armijo * alpha * slope) {
                        accepted = true;
                        break;
                    }
                }
                alpha *= 0.5;
            }
            if (!accepted) {
                if (flat) break;  // at the rounding floor for this level
                report.final_energy = e0;
                report.residual_dual_norm = res;
                report.sup_norm = u.cwiseAbs().maxCoeff();
                throw NonconvergenceError("line search failed after " + std::to_string(opts.max_halvings) +
                                              " halvings at eps = " + std::to_string(eps),
                                          report);
            }
            u = trial;
            ++report.newton_iterations;
            e0 = energy_of(problem, u, eps, &magnitude);
            g = elim.restrict(gradient_full(problem, u, eps));
            res = scaled_norm(g, elim.n);
            report.log.push_back({static_cast<int>(level), it, eps, e0, res, alpha});
        }
    }

    Field field(problem.mesh(), u);
    report.final_energy = energy_of(problem, u, 0.0);
    report.residual_dual_norm = weak_residual_norm(problem, field);
    report.sup_norm = sup_norm(field);
    report.converged = report.residual_dual_norm <= report.tol;
    return {std::move(field), std::move(report)};
}

std::pair<Field, SolveReport> solve_growth(const ProblemSpec& problem, const SolverOptions& opts) {
    const Mesh& m = *problem.mesh();
    const int nq = m.quadrature_size();
    Eigen::VectorXd u = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m.num_nodes()));
    SolveReport last;
    int newton_total = 0;
    for (int k = 1; k <= opts.picard_max_iter; ++k) {
        std::vector<double> f_q;
        f_q.reserve(m.num_elements() * static_cast<std::size_t>(nq));
        const Field current(problem.mesh(), u);
        for (std::size_t e = 0; e < m.num_elements(); ++e) {
            const auto pts = m.quadrature(e);
            for (int q = 0; q < nq; ++q) {
                f_q.push_back(problem.growth_value(e, q, current.value_at(e, pts[static_cast<std::size_t>(q)])));
            }
        }
        const auto frozen = ProblemSpec::with_quadrature_values(problem.mesh(), problem.nf(), std::move(f_q));
        auto [next, report] = solve_source(frozen, opts, Eigen::VectorXd::Zero(u.size()));
        newton_total += report.newton_iterations;
        const Eigen::VectorXd updated = (1.0 - opts.picard_damping) * u + opts.picard_damping * next.values();
        const double change = (updated - u).cwiseAbs().maxCoeff();
        if (!updated.allFinite()) {
            report.picard_iterations = k;
            throw NonconvergenceError("Picard iteration diverged", report);
        }
        u = updated;
        last = std::move(report);
        last.picard_iterations = k;
        if (change <= opts.picard_tol * std::max(1.0, u.cwiseAbs().maxCoeff())) {
            Field field(problem.mesh(), u);
            last.newton_iterations = newton_total;
            last.final_energy = energy_of(frozen, u, 0.0);
            last.residual_dual_norm = weak_residual_norm(frozen, field);
            last.sup_norm = sup_norm(field);
            last.converged = last.residual_dual_norm <= std::max(last.tol, 10.0 * change);
            return {std::move(field), std::move(last)};
        }
    }
    last.newton_iterations = newton_total;
    last.sup_norm = u.cwiseAbs().maxCoeff();
    throw NonconvergenceError("Picard iteration did not settle in " + std::to_string(opts.picard_max_iter) +
                                  " iterations",
                              last);
}

}  // namespace

ProblemSpec::ProblemSpec(std::shared_ptr<const Mesh> mesh, NFunction nf)
    : mesh_(std::move(mesh)), nf_(std::move(nf)) {
    if (!mesh_) throw ArgumentError(kModule, "ProblemSpec needs a mesh");
}

void ProblemSpec::set_source_values(std::vector<double> f_q) {
    const Mesh& m = *mesh_;
    const auto nq = static_cast<std::size_t>(m.quadrature_size());
    if (f_q.size() != m.num_elements() * nq) {
        throw ArgumentError(kModule, "source values do not match the quadrature layout");
    }
    for (const double v : f_q) {
        if (!std::isfinite(v)) throw ValidationError(kModule, "source must be finite at quadrature points");
    }
    raw_f_q_ = f_q;
    if (truncation_) {
        for (double& v : f_q) v = std::min(v, double(*truncation_));
    }
    f_q_ = std::move(f_q);
    load_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m.num_nodes()));
    for (std::size_t e = 0; e < m.num_elements(); ++e) {
        const auto c = m.element(e);
        const auto pts = m.quadrature(e);
        for (std::size_t q = 0; q < nq; ++q) {
            const double wf = pts[q].weight * f_q_[e * nq + q];
            for (std::size_t i = 0; i < c.size(); ++i) load_[c[i]] += wf * pts[q].barycentric[i];
        }
    }
}

ProblemSpec ProblemSpec::with_source(std::shared_ptr<const Mesh> mesh, NFunction nf, Source f) {
    ProblemSpec p(std::move(mesh), std::move(nf));
    const Mesh& m = *p.mesh_;
    std::vector<double> f_q;
    f_q.reserve(m.num_elements() * static_cast<std::size_t>(m.quadrature_size()));
    for (std::size_t e = 0; e < m.num_elements(); ++e) {
        for (const auto& qp : m.quadrature(e)) f_q.push_back(f(qp.x[0], qp.x[1]));
    }
    p.set_source_values(std::move(f_q));
    return p;
}

ProblemSpec ProblemSpec::with_field(std::shared_ptr<const Mesh> mesh, NFunction nf, Field f) {
    if (f.mesh_ptr() != mesh && f.mesh().num_nodes() != mesh->num_nodes()) {
        throw ArgumentError(kModule, "source field lives on a different mesh");
    }
    ProblemSpec p(std::move(mesh), std::move(nf));
    const Mesh& m = *p.mesh_;
    const Field on_mesh(p.mesh_, f.values());
    std::vector<double> f_q;
    for (std::size_t e = 0; e < m.num_elements(); ++e) {
        for (const auto& qp : m.quadrature(e)) f_q.push_back(on_mesh.value_at(e, qp));
    }
    p.set_source_values(std::move(f_q));
    return p;
}

ProblemSpec ProblemSpec::with_quadrature_values(std::shared_ptr<const Mesh> mesh, NFunction nf,
                                                std::vector<double> f_q) {
    ProblemSpec p(std::move(mesh), std::move(nf));
    p.set_source_values(std::move(f_q));
    return p;
}

ProblemSpec ProblemSpec::with_growth(std::shared_ptr<const Mesh> mesh, NFunction nf, GrowthSpec growth) {
    ProblemSpec p(std::move(mesh), std::move(nf));
    p.rhs_kind_ = RhsKind::growth_g;
    const Mesh& m = *p.mesh_;
    const double alpha = growth.alpha == IndexSelector::ell ? p.nf_.ell() : p.nf_.em();
    switch (growth.kind) {
        case GrowthKind::sub_a: {
            if (!growth.a) throw ValidationError(kModule, "sub_a growth needs a coefficient field a");
            const Field a(p.mesh_, growth.a->values());
            for (std::size_t e = 0; e < m.num_elements(); ++e) {
                for (const auto& qp : m.quadrature(e)) p.a_q_.push_back(a.value_at(e, qp));
            }
            break;
        }
        case GrowthKind::sub_power: {
            const double star = sobolev_exponent(alpha, p.nf_.dim());
            if (!(growth.C > 0.0 && alpha < growth.r && growth.r < star)) {
                throw ValidationError(kModule, "sub_power growth needs C > 0 and alpha < r < alpha*");
            }
            break;
        }
        case GrowthKind::critical:
            if (!(growth.C > 0.0)) throw ValidationError(kModule, "critical growth needs C > 0");
            growth.r = sobolev_exponent(alpha, p.nf_.dim());
            break;
    }
    p.growth_ = std::move(growth);
    p.load_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m.num_nodes()));
    return p;
}

ProblemSpec ProblemSpec::truncated(int n) const {
    if (rhs_kind_ != RhsKind::data_f) throw UnsupportedError(kModule, "truncation applies to data_f problems");
    ProblemSpec p = *this;
    p.truncation_ = n;
    p.set_source_values(raw_f_q_);
    return p;
}

double ProblemSpec::growth_alpha() const {
    if (!growth_) throw PreconditionError(kModule, "problem has no growth class");
    return growth_->alpha == IndexSelector::ell ? nf_.ell() : nf_.em();
}

double ProblemSpec::growth_value(std::size_t e, int q, double t) const {
    const double alpha = growth_alpha();
    const double at = std::abs(t);
    const double low = std::pow(at, alpha - 1.0);
    switch (growth_->kind) {
        case GrowthKind::sub_a:
            return a_q_[e * static_cast<std::size_t>(mesh_->quadrature_size()) + static_cast<std::size_t>(q)] *
                   (1.0 + low);
        case GrowthKind::sub_power:
        case GrowthKind::critical: return growth_->C * (low + std::pow(at, growth_->r - 1.0));
    }
    return 0.0;
}

double default_tolerance(const Mesh& mesh) { return mesh.dimension() == 1 ? 1e-9 : 1e-8; }

double energy(const ProblemSpec& problem, const Field& u, double eps) {
    require_zero_boundary(problem, u.values(), "energy");
    return energy_of(problem, u.values(), eps);
}

Eigen::VectorXd energy_gradient(const ProblemSpec& problem, const Field& u, double eps) {
    require_zero_boundary(problem, u.values(), "energy_gradient");
    return gradient_full(problem, u.values(), eps);
}

std::pair<Field, SolveReport> solve_dirichlet(const ProblemSpec& problem, const SolverOptions& opts) {
    validate_nfunction(problem.nf());
    if (problem.rhs_kind() == RhsKind::growth_g) return solve_growth(problem, opts);
    return solve_source(problem, opts, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(problem.mesh()->num_nodes())));
}

std::vector<std::pair<Field, SolveReport>> truncated_sequence(const ProblemSpec& problem,
                                                              const std::vector<int>& n_list,
                                                              const SolverOptions& opts) {
    if (problem.rhs_kind() != RhsKind::data_f) {
        throw PreconditionError(kModule, "truncated_sequence needs a data_f problem");
    }
    if (n_list.empty()) throw ArgumentError(kModule, "truncated_sequence needs a nonempty n_list");
    for (std::size_t i = 0; i < n_list.size(); ++i) {
        if (n_list[i] < 1 || (i > 0 && n_list[i] <= n_list[i - 1])) {
            throw ArgumentError(kModule, "n_list must be strictly ascending positive integers");
        }
    }
    bool positive = false;
    const ProblemSpec first = problem.truncated(n_list.front());
    for (const double v : first.source_at_quadrature()) {
        if (v < 0.0) throw PreconditionError(kModule, "truncated_sequence needs f >= 0");
        positive = positive || v > 0.0;
    }
    if (!positive) throw PreconditionError(kModule, "truncated_sequence needs f not identically zero");
    std::vector<std::pair<Field, SolveReport>> out;
    out.reserve(n_list.size());
    for (const int n : n_list) out.push_back(solve_dirichlet(problem.truncated(n), opts));
    return out;
}

bool monotonicity_check(const std::vector<Field>& solutions, double tol) {
    if (solutions.empty()) return true;
    const Mesh& m = solutions.front().mesh();
    for (const auto& s : solutions) {
        if (s.mesh().num_nodes() != m.num_nodes()) throw ArgumentError(kModule, "fields must share a mesh");
    }
    const auto& first = solutions.front().values();
    for (const int i : m.interior_nodes()) {
        if (!(first[i] > -tol && first[i] > 0.0)) return false;
    }
    for (std::size_t k = 0; k + 1 < solutions.size(); ++k) {
        if ((solutions[k].values().array() > solutions[k + 1].values().array() + tol).any()) return false;
    }
    return true;
}

double weak_residual_norm(const ProblemSpec& problem, const Field& u) {
    require_zero_boundary(problem, u.values(), "weak_residual_norm");
    const Elimination elim(*problem.mesh());
    return scaled_norm(elim.restrict(gradient_full(problem, u.values(), 0.0)), elim.n);
}

bool positivity_check(const Field& u, double tol) {
    const auto& interior = u.mesh().interior_nodes();
    if (interior.empty()) return false;
    return std::all_of(interior.begin(), interior.end(), [&](int i) { return u[static_cast<std::size_t>(i)] > tol; });
}

}  // namespace orlicz
