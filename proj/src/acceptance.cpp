#include "orlicz/acceptance.hpp"

#include "orlicz/errors.hpp"
#include "orlicz/moser.hpp"
#include "orlicz/nfunction.hpp"
#include "orlicz/norms.hpp"
#include "orlicz/scalar.hpp"
#include "orlicz/solver.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

namespace orlicz {
namespace {

const auto kOne = [](double, double) { return 1.0; };

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, pattern, a, b, c);
    return buf;
}

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

double p_laplace_exact(double p, double x) {
    const double pp = p / (p - 1.0);
    return (p - 1.0) / p * (std::pow(0.5, pp) - std::pow(std::abs(x - 0.5), pp));
}

bool poisson_1d(std::string& detail) {
    const auto m = build_interval_mesh(0.0, 1.0, 256);
    const auto [u, rep] = solve_dirichlet(ProblemSpec::with_source(m, NFunction::power(2.0, 2), kOne));
    const double err = std::abs(rep.sup_norm - 0.125);
    detail = fmt("sup_norm %.10g, |err| %.3g (tol 1e-3)", rep.sup_norm, err);
    return rep.converged && err <= 1e-3;
}

bool p_laplace_1d(std::string& detail) {
    const double exact_sup = 2.0 / 3.0 * std::pow(0.5, 1.5);
    const auto nf = NFunction::power(3.0, 4);
    double sup512 = 0.0;
    const auto l2_error = [&](int n) {
        const auto m = build_interval_mesh(0.0, 1.0, n);
        const auto [u, rep] = solve_dirichlet(ProblemSpec::with_source(m, nf, kOne));
        if (!rep.converged) throw InternalError("acceptance", "p-Laplace solve did not converge");
        if (n == 512) sup512 = rep.sup_norm;
        double sum = 0.0;
        for (std::size_t e = 0; e < m->num_elements(); ++e) {
            for (const auto& qp : m->quadrature(e)) {
                const double d = u.value_at(e, qp) - p_laplace_exact(3.0, qp.x[0]);
                sum += qp.weight * d * d;
            }
        }
        return std::sqrt(sum);
    };
    double prev = l2_error(64);
    double min_order = 1e300;
    for (const int n : {128, 256, 512}) {
        const double cur = l2_error(n);
        min_order = std::min(min_order, std::log2(prev / cur));
        prev = cur;
    }
    const double err = std::abs(sup512 - exact_sup);
    detail = fmt("sup_norm %.10g, |err| %.3g (tol 2e-3), min L2 order %.4g (>= 1.8)", sup512, err, min_order);
    return err <= 2e-3 && min_order >= 1.8;
}

bool monotone_truncation(std::string& detail) {
    const auto m = build_interval_mesh(0.0, 1.0, 256);
    const auto problem =
        ProblemSpec::with_source(m, NFunction::power(3.0, 4), [](double x, double) { return std::pow(x, -0.25); });
    const auto chain = truncated_sequence(problem, {1, 2, 4, 8, 16});
    std::vector<Field> fields;
    bool converged = true;
    for (const auto& [u, r] : chain) {
        fields.push_back(u);
        converged = converged && r.converged;
    }
    const double scale = sup_norm(fields.back());
    const double tol = 1e-8 * scale;
    const bool monotone = monotonicity_check(fields, tol);
    bool positive = true;
    for (const auto& f : fields) positive = positive && positivity_check(f, 0.0);
    detail = fmt("sup u_1 %.6g, sup u_16 %.6g, tol %.3g", sup_norm(fields.front()), scale, tol);
    detail += monotone ? ", monotone" : ", NOT monotone";
    detail += positive ? ", positive" : ", NOT positive";
    return converged && monotone && positive;
}

bool moser_dominance(std::string& detail) {
    const auto m = build_rect_mesh(1.0, 1.0, 64, 64);
    const auto nf = NFunction::power(1.8, 2);
    const auto problem = ProblemSpec::with_source(m, nf, kOne);
    const auto [u, rep] = solve_dirichlet(problem);
    const auto chain = truncated_sequence(problem, {1});
    const Field& u1 = chain.front().first;

    MoserInputs in;
    in.q = 10.0;
    in.ell = nf.ell();
    in.em = nf.em();
    in.dim_N = 2;
    in.norm_f_q = 1.0;
    in.omega_measure = m->total_measure();
    in.norm_u1_L1 = lp_norm(u1, 1.0);
    in.bigphi_at_one = nf.bigphi_at_one();
    in.mu = talenti_constant(in.ell, 2);
    const double beta1 = in.q / (in.q - 1.0) * (in.ell - 1.0);
    in.F1 = beta1 * std::log(lp_norm(u, beta1));
    const auto bound = homog_apriori_bound(in, 30);
    const bool dominates = verify_bound(u, bound) && bound.linf_bound >= rep.sup_norm;
    const double gap_tol = 1e-6;
    detail = fmt("e^d0 %.6g >= sup %.6g, |d0 - truncated| %.3g (tol 1e-6)", bound.linf_bound, rep.sup_norm,
                 bound.d0_gap);
    return rep.converged && dominates && bound.d0_gap <= gap_tol;
}

std::vector<NFunction> catalog() {
    return {NFunction::power(1.5, 2), NFunction::power(2.0, 3), NFunction::power(3.0, 4),
            NFunction::power_sum(1.5, 1.8, 2), NFunction::power_sum(2.0, 3.0, 4),
            NFunction::elasticity(1.2, 3), NFunction::plasticity(2.0, 1.0, 4),
            NFunction::plasticity(1.0, 0.5, 2), NFunction::newtonian_fluid(0.5, 1.0, 4)};
}

bool zeta_sandwich_catalog(std::string& detail) {
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> u(1e-9, 10.0);
    int total = 0;
    int passed = 0;
    for (const auto& nf : catalog()) {
        for (int i = 0; i < 10'000; ++i) {
            const double rho = u(rng);
            const double t = u(rng);
            ++total;
            if (zeta_bounds_check(nf, rho, t)) ++passed;
        }
    }
    detail = std::to_string(passed) + "/" + std::to_string(total) + " samples over 9 catalog members";
    return passed == total;
}

bool sobolev_index_bounds(std::string& detail) {
    const std::vector<double> grid = scalar::log_grid(1e-3, 1e3, 128);
    int total = 0;
    int passed = 0;
    double worst = 0.0;
    for (const auto& nf : {NFunction::power(1.5, 2), NFunction::power(2.0, 4), NFunction::power_sum(1.5, 1.8, 2),
                           NFunction::power_sum(2.0, 3.0, 4)}) {
        const double lo = nf.ell_star();
        const double hi = nf.em_star();
        for (const double t : grid) {
            const double r = sobolev_conjugate_log_derivative(nf, t);
            const double excess = std::max(lo - r, r - hi);
            worst = std::max(worst, excess);
            ++total;
            if (excess <= 1e-3) ++passed;
        }
    }
    detail = std::to_string(passed) + "/" + std::to_string(total) + " grid points, worst excess " + fmt("%.3g", worst);
    return passed == total;
}

bool lemma_pointwise(std::string& detail) {
    std::mt19937_64 rng(103);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    std::uniform_real_distribution<double> logu(-3.0, 3.0);
    int failures = 0;
    for (const double ell : {1.5, 2.0, 3.0}) {
        for (int i = 0; i < 100'000; ++i) {
            const double u = uni(rng) * std::pow(10.0, logu(rng) / 3.0);
            const std::array<double, 3> g{uni(rng), uni(rng), uni(rng)};
            const double s = std::pow(10.0, logu(rng) / 1.5);
            const double L = std::pow(10.0, logu(rng));
            if (!lemma_est_check(u, g, s, L, ell)) ++failures;
        }
    }
    double worst_identity = 0.0;
    for (int i = 0; i < 10'000; ++i) {
        const double u = uni(rng);
        const std::array<double, 2> g{uni(rng), uni(rng)};
        const double s = 0.05 + 2.0 * std::abs(uni(rng));
        const double L = 2.0 * std::pow(std::abs(u), s) + 1e-3;
        const auto sides = lemma_est_sides(u, g, s, L, 2.0);
        worst_identity = std::max(worst_identity, std::abs(sides.lhs - sides.rhs) / std::max(1.0, sides.rhs));
    }
    detail = std::to_string(failures) + " failures in 3x1e5 samples, ell=2 identity gap " + fmt("%.3g", worst_identity);
    return failures == 0 && worst_identity <= 1e-12;
}

bool exponent_arithmetic(std::string& detail) {
    std::mt19937_64 rng(107);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double worst_beta = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const int N = 2 + static_cast<int>(rng() % 5);
        const double ell = 1.05 + (N - 1.1) * unit(rng);
        const double q = N / ell * (1.01 + 5.0 * unit(rng));
        const auto seq = beta_sequence(q, ell, N, 30);
        worst_beta = std::max(worst_beta, seq.max_rel_gap);
    }
    double worst_r = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const int N = 2 + static_cast<int>(rng() % 6);
        const double ell = 1.01 + (N - 1.02) * unit(rng);
        const double star = N * ell / (N - ell);
        const double r = crit_r(ell, N);
        worst_r = std::max(worst_r, std::abs(r - 1.0 - (star - ell) * (star - ell) / (ell * star)) / std::max(1.0, r));
    }
    int ladder_mismatch = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const int N = 2 + static_cast<int>(rng() % 5);
        const double ell = 1.05 + (N - 1.1) * unit(rng);
        const double q = 1.0 + 199.0 * unit(rng);
        int scan = 1;
        while (!(ell * std::pow(N / (N - ell), scan) > q)) ++scan;
        if (subcrit_ladder(ell, N, q).steps_needed != scan) ++ladder_mismatch;
    }
    detail = fmt("beta gap %.3g (tol 1e-10), r identity gap %.3g (tol 1e-12), ", worst_beta, worst_r) +
             std::to_string(ladder_mismatch) + " ladder mismatches";
    return worst_beta <= 1e-10 && worst_r <= 1e-12 && ladder_mismatch == 0;
}

bool luxemburg_consistency(std::string& detail) {
    std::mt19937_64 rng(109);
    const auto rect = build_rect_mesh(1.0, 1.0, 12, 12);
    const double p = 2.5;
    const auto pure = NFunction::power(p, 8, p);  // t^p
    const auto mixed = NFunction::power_sum(1.5, 1.8, 2);
    double worst_lp = 0.0;
    double worst_sandwich = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const auto u = random_field(rect, rng, false);
        const double lp = lp_norm(u, p);
        worst_lp = std::max(worst_lp, std::abs(luxemburg_norm(u, pure) - lp) / lp);
        const double norm = luxemburg_norm(u, mixed);
        const double mod = modular(u, mixed);
        const double z0 = std::min(std::pow(norm, mixed.ell()), std::pow(norm, mixed.em()));
        const double z1 = std::max(std::pow(norm, mixed.ell()), std::pow(norm, mixed.em()));
        worst_sandwich = std::max({worst_sandwich, (z0 - mod) / mod, (mod - z1) / z1});
    }
    const auto square = build_rect_mesh(1.0, 1.0, 32, 32);
    int poincare_fail = 0;
    for (int trial = 0; trial < 100; ++trial) {
        if (!poincare_check(random_field(square, rng, true), mixed)) ++poincare_fail;
    }
    detail = fmt("Lp gap %.3g (tol 1e-9), sandwich excess %.3g (tol 1e-7), ", worst_lp, worst_sandwich) +
             std::to_string(poincare_fail) + " Poincare failures";
    return worst_lp <= 1e-9 && worst_sandwich <= 1e-7 && poincare_fail == 0;
}

bool gradient_check(std::string& detail) {
    std::mt19937_64 rng(113);
    std::uniform_real_distribution<double> amp(-1.0, 1.0);
    const auto m = build_rect_mesh(1.0, 1.0, 5, 4);
    double worst = 0.0;
    for (const auto& nf : {NFunction::power(1.5, 2), NFunction::power(3.0, 4), NFunction::power_sum(1.5, 1.8, 2)}) {
        const auto problem = ProblemSpec::with_source(m, nf, [](double x, double y) { return 1.0 + x * y; });
        for (int trial = 0; trial < 10; ++trial) {
            Eigen::VectorXd v(static_cast<Eigen::Index>(m->num_nodes()));
            for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = amp(rng);
            for (const int b : m->boundary_nodes()) v[b] = 0.0;
            const Field u(m, v);
            const Eigen::VectorXd g = energy_gradient(problem, u);
            const double scale = g.cwiseAbs().maxCoeff();
            for (const int i : m->interior_nodes()) {
                const double h = 1e-6;
                Eigen::VectorXd plus = v;
                Eigen::VectorXd minus = v;
                plus[i] += h;
                minus[i] -= h;
                const double fd = (energy(problem, Field(m, plus)) - energy(problem, Field(m, minus))) / (2.0 * h);
                worst = std::max(worst, std::abs(g[i] - fd) / scale);
            }
        }
    }
    detail = fmt("worst |g - fd| / |g|_inf = %.3g (tol 1e-5)", worst);
    return worst <= 1e-5;
}

}  // namespace

const std::vector<Criterion>& acceptance_criteria() {
    static const std::vector<Criterion> list{
        {1, "1D Poisson oracle", 1.0, poisson_1d},
        {2, "1D p-Laplacian oracle and convergence order", 5.0, p_laplace_1d},
        {3, "monotone truncation chain", 10.0, monotone_truncation},
        {4, "a-priori bound dominates the discrete solution", 60.0, moser_dominance},
        {5, "index sandwich for catalog N-functions", 5.0, zeta_sandwich_catalog},
        {6, "Sobolev conjugate index bounds", 30.0, sobolev_index_bounds},
        {7, "pointwise truncation inequality", 5.0, lemma_pointwise},
        {8, "exponent arithmetic", 1.0, exponent_arithmetic},
        {9, "Luxemburg norm consistency and Poincare", 10.0, luxemburg_consistency},
        {10, "energy gradient against finite differences", 30.0, gradient_check},
    };
    return list;
}

CriterionResult run_criterion(const Criterion& criterion) {
    CriterionResult r;
    r.id = criterion.id;
    r.name = criterion.name;
    r.budget_seconds = criterion.budget_seconds;
    const auto start = std::chrono::steady_clock::now();
    try {
        r.passed = criterion.body(r.detail);
    } catch (const std::exception& e) {
        r.passed = false;
        r.detail = std::string("exception: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    r.within_budget = r.seconds < r.budget_seconds;
    return r;
}

std::vector<CriterionResult> run_acceptance() {
    std::vector<CriterionResult> out;
    for (const auto& c : acceptance_criteria()) out.push_back(run_criterion(c));
    return out;
}

std::string format_result(const CriterionResult& r) {
    std::ostringstream os;
    os << (r.ok() ? "PASS" : "FAIL") << " [" << r.id << "] " << r.name << " ("
       << fmt("%.3f s / %g s", r.seconds, r.budget_seconds) << (r.within_budget ? "" : ", over budget")
       << "): " << r.detail;
    return os.str();
}

}  // namespace orlicz
