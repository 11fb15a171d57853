#include "orlicz/norms.hpp"

#include "orlicz/errors.hpp"
#include "orlicz/scalar.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace orlicz {

namespace {

constexpr const char* kModule = "orlicz_norms";

// |u| sampled at weighted points; the modular is sum w Phi(a / lambda).
struct Samples {
    std::vector<double> a;
    std::vector<double> w;
    double measure = 0.0;
};

Samples value_samples(const Field& u) {
    const Mesh& m = u.mesh();
    Samples s;
    s.a.reserve(m.num_elements() * static_cast<std::size_t>(m.quadrature_size()));
    s.w.reserve(s.a.capacity());
    for (std::size_t e = 0; e < m.num_elements(); ++e) {
        for (const auto& qp : m.quadrature(e)) {
            s.a.push_back(std::abs(u.value_at(e, qp)));
            s.w.push_back(qp.weight);
        }
    }
    s.measure = m.total_measure();
    return s;
}

Samples gradient_samples(const Field& u) {
    const Mesh& m = u.mesh();
    Samples s;
    s.a.reserve(m.num_elements());
    s.w.reserve(m.num_elements());
    for (std::size_t e = 0; e < m.num_elements(); ++e) {
        s.a.push_back(element_gradient_norm(u, e));
        s.w.push_back(m.measure(e));
    }
    s.measure = m.total_measure();
    return s;
}

double modular_at(const Samples& s, const NFunction& nf, double lambda) {
    double sum = 0.0;
    for (std::size_t i = 0; i < s.a.size(); ++i) {
        if (s.a[i] > 0.0) sum += s.w[i] * nf.big_phi(s.a[i] / lambda);
    }
    return sum;
}

double modular_slope(const Samples& s, const NFunction& nf, double lambda) {
    double sum = 0.0;
    for (std::size_t i = 0; i < s.a.size(); ++i) {
        if (s.a[i] > 0.0) {
            const double r = s.a[i] / lambda;
            sum -= s.w[i] * nf.big_phi_prime(r) * r / lambda;
        }
    }
    return sum;
}

double luxemburg(const Samples& s, const NFunction& nf) {
    const double amax = s.a.empty() ? 0.0 : *std::max_element(s.a.begin(), s.a.end());
    if (amax == 0.0) return 0.0;
    const double lambda0 = amax / nf.inverse(1.0 / s.measure);
    const auto f = [&](double lambda) { return modular_at(s, nf, lambda) - 1.0; };
    double lo = 1e-3 * lambda0;
    double hi = 1e3 * lambda0;
    while (f(lo) < 0.0) {
        lo *= 1e-3;
        if (lo < std::numeric_limits<double>::min()) throw RangeError(kModule, "luxemburg_norm: no lower bracket");
    }
    while (f(hi) > 0.0) {
        hi *= 1e3;
        if (!std::isfinite(hi)) throw RangeError(kModule, "luxemburg_norm: no upper bracket");
    }
    scalar::RootOptions opts;
    opts.residual_tol = 1e-13;
    return scalar::find_root(f, scalar::Fn([&](double lambda) { return modular_slope(s, nf, lambda); }), lo,
                             hi, 1.0, opts);
}

}  // namespace

double modular(const Field& u, const NFunction& nf) { return modular_at(value_samples(u), nf, 1.0); }

double modular(const Eigen::VectorXd& values, const NFunction& nf, const std::shared_ptr<const Mesh>& mesh) {
    if (!mesh || static_cast<std::size_t>(values.size()) != mesh->num_nodes()) {
        throw ArgumentError(kModule, "modular: field size does not match mesh");
    }
    return modular(Field(mesh, values), nf);
}

double grad_modular(const Field& u, const NFunction& nf) { return modular_at(gradient_samples(u), nf, 1.0); }

double luxemburg_norm(const Field& u, const NFunction& nf) { return luxemburg(value_samples(u), nf); }

double grad_luxemburg_norm(const Field& u, const NFunction& nf) { return luxemburg(gradient_samples(u), nf); }

double lp_norm(const Field& u, double p) {
    if (std::isinf(p) && p > 0.0) return sup_norm(u);
    if (!(p > 0.0)) throw ArgumentError(kModule, "lp_norm needs p > 0");
    const Samples s = value_samples(u);
    const double amax = s.a.empty() ? 0.0 : *std::max_element(s.a.begin(), s.a.end());
    if (amax == 0.0) return 0.0;
    // scaled by the max to keep large exponents finite
    double sum = 0.0;
    for (std::size_t i = 0; i < s.a.size(); ++i) sum += s.w[i] * std::pow(s.a[i] / amax, p);
    return amax * std::pow(sum, 1.0 / p);
}

double sup_norm(const Field& u) { return u.values().size() == 0 ? 0.0 : u.values().cwiseAbs().maxCoeff(); }

NormReport norm_report(const Field& u, const NFunction& nf, const std::vector<double>& exponents) {
    NormReport r;
    r.modular = modular(u, nf);
    r.luxemburg = luxemburg_norm(u, nf);
    r.grad_luxemburg = grad_luxemburg_norm(u, nf);
    for (const double p : exponents) r.lp_values[p] = lp_norm(u, p);
    return r;
}

PoincareReport poincare_report(const Field& u, const NFunction& nf) {
    for (const int b : u.mesh().boundary_nodes()) {
        if (u[static_cast<std::size_t>(b)] != 0.0) {
            throw PreconditionError(kModule, "poincare_check: field is nonzero on boundary node " + std::to_string(b));
        }
    }
    PoincareReport r;
    r.diameter = u.mesh().diameter();
    r.lhs = luxemburg_norm(u, nf);
    r.rhs = 2.0 * r.diameter * grad_luxemburg_norm(u, nf);
    r.holds = r.lhs <= r.rhs * (1.0 + 1e-8);
    return r;
}

bool poincare_check(const Field& u, const NFunction& nf) { return poincare_report(u, nf).holds; }

}  // namespace orlicz
