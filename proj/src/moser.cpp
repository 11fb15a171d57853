#include "orlicz/moser.hpp"

#include "orlicz/errors.hpp"
#include "orlicz/norms.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace orlicz {
namespace {

constexpr const char* kModule = "moser_engine";

void require_exponent(double ell, int dim_N, const char* name) {
    if (dim_N < 1 || !(ell > 1.0) || !(ell < dim_N)) {
        throw DomainError(kModule, std::string(name) + " must lie in (1, N), got " + std::to_string(ell) +
                                       " with N = " + std::to_string(dim_N));
    }
}

void require_positive(double v, const char* name) {
    if (!std::isfinite(v) || !(v > 0.0)) {
        throw ArgumentError(kModule, std::string(name) + " must be positive and finite");
    }
}

MoserReport run_chain(const MoserInputs& in, double exponent, double threshold_T, bool m_variant,
                      int k_max) {
    require_positive(in.q, "q");
    require_positive(in.norm_f_q, "norm_f_q");
    require_positive(in.omega_measure, "omega_measure");
    require_positive(in.norm_u1_L1, "norm_u1_L1");
    require_positive(in.bigphi_at_one, "bigphi_at_one");
    require_positive(in.mu, "mu");
    require_positive(in.ell, "ell");
    if (!std::isfinite(in.F1)) throw ArgumentError(kModule, "F1 must be finite");
    if (k_max < 1) throw ArgumentError(kModule, "k_max must be at least 1");

    const BetaSequence seq = beta_sequence(in.q, exponent, in.dim_N, k_max);
    const double qp = seq.q_prime;
    const double delta = seq.delta;
    const double star = sobolev_exponent(exponent, in.dim_N);
    const double beta1 = seq.beta.front();

    MoserReport rep;
    rep.m_variant = m_variant;
    rep.exponent = exponent;
    rep.exponent_star = star;
    rep.q_prime = qp;
    rep.delta = delta;
    rep.beta_1 = beta1;
    rep.beta = seq.beta;
    rep.beta_star = seq.beta_star;
    rep.threshold_T = threshold_T;

    const double lphi = in.ell * in.bigphi_at_one;
    const double t_factor = m_variant ? std::pow(threshold_T, exponent) : 1.0;
    rep.A = qp / lphi *
            (in.norm_f_q + lphi * t_factor / qp * std::pow(in.omega_measure, 2.0 - 1.0 / qp) / in.norm_u1_L1);
    rep.b = star * std::log(in.mu * rep.A * beta1);

    rep.lambda.resize(static_cast<std::size_t>(k_max));
    for (int k = 0; k < k_max; ++k) {
        rep.lambda[k] = star * std::log(in.mu * rep.A * seq.beta_star[k]);
    }
    rep.F.resize(static_cast<std::size_t>(k_max));
    rep.F[0] = in.F1;
    for (int k = 1; k < k_max; ++k) rep.F[k] = rep.lambda[k - 1] + delta * rep.F[k - 1];
    rep.ratio.resize(rep.F.size());
    for (std::size_t k = 0; k < rep.F.size(); ++k) rep.ratio[k] = rep.F[k] / seq.beta[k];

    const double dm1 = delta - 1.0;
    const double log_two_over = std::log(2.0 / dm1);
    const double numerator = in.F1 + rep.b / dm1 +
                             star * (log_two_over / dm1 + std::log(delta) * delta / (dm1 * dm1));
    rep.d0 = numerator / ((2.0 * delta - 1.0) / dm1 * beta1);

    double series = in.F1;
    double inv_pow = 1.0;
    for (int j = 1; j < k_max; ++j) {
        inv_pow /= delta;
        series += inv_pow * (rep.b + star * (log_two_over + j * std::log(delta)));
    }
    const double denom = (2.0 * delta - 1.0 - std::pow(delta, 1.0 - k_max)) / dm1 * beta1;
    rep.d0_truncated = series / denom;
    rep.d0_gap = std::abs(rep.d0 - rep.d0_truncated);
    rep.linf_bound = std::exp(rep.d0);
    if (!std::isfinite(rep.linf_bound)) throw RangeError(kModule, "e^d0 overflows");
    return rep;
}

}  // namespace

double talenti_constant(double p, int dim_N) {
    require_exponent(p, dim_N, "p");
    const double n = dim_N;
    const double log_ratio = std::lgamma(1.0 + n / 2.0) + std::lgamma(n) - std::lgamma(n / p) -
                             std::lgamma(1.0 + n - n / p);
    return std::pow(std::numbers::pi, -0.5) * std::pow(n, -1.0 / p) *
           std::pow((p - 1.0) / (n - p), 1.0 - 1.0 / p) * std::exp(log_ratio / n);
}

BetaSequence beta_sequence(double q, double ell, int dim_N, int k_max) {
    require_exponent(ell, dim_N, "ell");
    if (k_max < 1) throw ArgumentError(kModule, "k_max must be at least 1");
    if (!(q > dim_N / ell)) {
        throw DomainError(kModule, "q must exceed N / ell (delta <= 1 otherwise)");
    }
    BetaSequence out;
    out.q_prime = q / (q - 1.0);
    const double star = sobolev_exponent(ell, dim_N);
    out.delta = star / (ell * out.q_prime);
    if (!(out.delta > 1.0)) throw DomainError(kModule, "delta <= 1");

    const double delta = out.delta;
    const double beta1 = out.q_prime * (ell - 1.0);
    const auto n = static_cast<std::size_t>(k_max);
    out.beta.resize(n);
    out.beta_star.resize(n);
    out.beta_closed.resize(n);
    out.beta_star_closed.resize(n);
    out.beta[0] = beta1;
    for (std::size_t k = 0; k < n; ++k) {
        if (k > 0) out.beta[k] = delta * out.beta_star[k - 1];
        out.beta_star[k] = out.beta[k] + beta1;
        const double dk = std::pow(delta, static_cast<double>(k + 1));
        const double dk1 = std::pow(delta, static_cast<double>(k));
        out.beta_closed[k] = (2.0 * dk - dk1 - delta) / (delta - 1.0) * beta1;
        out.beta_star_closed[k] = (2.0 * dk - dk1 - 1.0) / (delta - 1.0) * beta1;
        out.max_rel_gap = std::max({out.max_rel_gap,
                                    std::abs(out.beta[k] - out.beta_closed[k]) / out.beta[k],
                                    std::abs(out.beta_star[k] - out.beta_star_closed[k]) / out.beta_star[k]});
    }
    if (out.max_rel_gap > 1e-10) {
        throw InternalError(kModule, "beta recursion disagrees with its closed form");
    }
    return out;
}

MoserReport homog_apriori_bound(const MoserInputs& in, int k_max) {
    return run_chain(in, in.ell, 1.0, false, k_max);
}

MoserReport homog_apriori_bound_m(const MoserInputs& in, const EquivalenceReport& equivalence, int k_max) {
    if (!equivalence.equivalent) {
        throw PreconditionError(kModule, "Phi is not equivalent to t^m; the m-branch does not apply");
    }
    require_positive(in.em, "em");
    require_positive(equivalence.t0, "equivalence threshold");
    return run_chain(in, in.em, equivalence.t0, true, k_max);
}

double c_ell(double ell) { return ell <= 2.0 ? 1.0 : std::pow(2.0, ell / 2.0 - 1.0); }

double h_weight(double s, double ell) {
    require_positive(s, "s");
    return c_ell(ell) * std::max(1.0, std::pow(2.0 * s + s * s, ell / 2.0) / (ell * s));
}

LemmaSides lemma_est_sides(double u, std::span<const double> grad_u, double s, double L, double ell) {
    if (!(s > 0.0) || !(L > 0.0)) throw ArgumentError(kModule, "s and L must be positive");
    if (!std::isfinite(u) || !std::isfinite(s) || !std::isfinite(L) || !std::isfinite(ell)) {
        throw ArgumentError(kModule, "lemma inputs must be finite");
    }
    double g2 = 0.0;
    for (double g : grad_u) {
        if (!std::isfinite(g)) throw ArgumentError(kModule, "gradient must be finite");
        g2 += g * g;
    }
    const double grad_pow = std::pow(g2, ell / 2.0);
    const double us = std::pow(std::abs(u), s);
    const bool untruncated = us <= L;

    LemmaSides out;
    out.lhs = untruncated ? std::pow((1.0 + s) * us, ell) * grad_pow : std::pow(L, ell) * grad_pow;
    const double first = grad_pow * std::pow(std::min(us, L), ell);
    const double second =
        untruncated ? std::pow(2.0 * s + s * s, ell / 2.0) * grad_pow * std::pow(us, ell) : 0.0;
    out.rhs = c_ell(ell) * (first + second);
    return out;
}

bool lemma_est_check(double u, std::span<const double> grad_u, double s, double L, double ell) {
    const LemmaSides sides = lemma_est_sides(u, grad_u, s, L, ell);
    const double scale = std::max({1.0, std::abs(sides.lhs), std::abs(sides.rhs)});
    return sides.lhs <= sides.rhs + 1e-12 * scale;
}

double cutoff_tail(const Field& a, double k, double s, double ell, int dim_N, double phi_at_one,
                   double S_embed) {
    require_positive(s, "s");
    require_positive(phi_at_one, "phi_at_one");
    require_positive(S_embed, "S_embed");
    require_positive(ell, "ell");
    if (dim_N < 1) throw ArgumentError(kModule, "dim_N must be positive");
    const std::vector<double> masses = a.mesh().lumped_masses();
    const double power = dim_N / ell;
    double integral = 0.0;
    for (std::size_t i = 0; i < masses.size(); ++i) {
        const double v = std::abs(a[i]);
        if (v >= k && v > 0.0) integral += masses[i] * std::pow(v, power);
    }
    return 2.0 * S_embed * c_ell(ell) * std::pow(1.0 + s, ell) / phi_at_one *
           std::pow(integral, ell / dim_N);
}

double cutoff_k(const Field& a, double s, double ell, int dim_N, double phi_at_one, double S_embed) {
    require_positive(s, "s");
    require_positive(phi_at_one, "phi_at_one");
    require_positive(S_embed, "S_embed");
    require_positive(ell, "ell");
    if (dim_N < 1) throw ArgumentError(kModule, "dim_N must be positive");
    const std::vector<double> masses = a.mesh().lumped_masses();
    const double power = dim_N / ell;
    const double factor = 2.0 * S_embed * c_ell(ell) * std::pow(1.0 + s, ell) / phi_at_one;

    std::vector<std::pair<double, double>> by_value;
    by_value.reserve(masses.size());
    for (std::size_t i = 0; i < masses.size(); ++i) {
        const double v = std::abs(a[i]);
        if (v > 0.0) by_value.emplace_back(v, masses[i] * std::pow(v, power));
    }
    std::sort(by_value.begin(), by_value.end());
    // suffix[i] is the tail integral over values >= by_value[i].first
    std::vector<double> suffix(by_value.size() + 1, 0.0);
    for (std::size_t i = by_value.size(); i-- > 0;) suffix[i] = suffix[i + 1] + by_value[i].second;

    auto tail = [&](std::size_t i) { return factor * std::pow(suffix[i], ell / dim_N); };
    if (by_value.empty() || tail(0) <= 0.5) return 0.0;

    // Smallest index whose strict tail (values above it) is small enough.
    std::size_t lo = 0;
    std::size_t hi = by_value.size() - 1;
    while (lo < hi) {
        const std::size_t mid = lo + (hi - lo) / 2;
        std::size_t next = mid + 1;
        while (next < by_value.size() && by_value[next].first == by_value[mid].first) ++next;
        if (tail(next) <= 0.5) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    return by_value[lo].first;
}

double crit_r(double ell, int dim_N) {
    require_exponent(ell, dim_N, "ell");
    const double star = sobolev_exponent(ell, dim_N);
    return (star * star - ell * star + ell * ell) / (ell * star);
}

CritBound crit_linf_bound(double k_const, double r, double ell, double base_norm) {
    if (!(r > 1.0) || !std::isfinite(r)) throw DomainError(kModule, "r must exceed 1");
    require_positive(k_const, "k_const");
    require_positive(ell, "ell");
    if (!(base_norm >= 0.0) || !std::isfinite(base_norm)) {
        throw ArgumentError(kModule, "base_norm must be nonnegative and finite");
    }
    CritBound out;
    out.r = r;
    out.ell = ell;
    out.k_const = k_const;
    out.base_norm = base_norm;
    const double log_k = std::log(std::max(k_const, 1.0));
    const double log_r = std::log(r);
    const double log_base = std::log(std::max(base_norm, 1.0));
    const double log_bound = log_k / (r - 1.0) + log_r * ell * r / ((r - 1.0) * (r - 1.0)) + log_base;
    out.bound = std::exp(log_bound);

    const double x = 1.0 / r;
    double s1 = 0.0;
    double s2 = 0.0;
    double xj = 1.0;
    for (int j = 1; j <= 20; ++j) {
        xj *= x;
        s1 += xj;
        s2 += j * xj;
        const double log_partial = log_k * s1 + log_r * ell * s2 + log_base;
        out.partial.push_back(std::exp(log_partial));
        const double t1 = xj / (r - 1.0);
        const double t2 = xj * x * ((j + 1.0) - j * x) / ((1.0 - x) * (1.0 - x));
        const double completed = std::exp(log_partial + log_k * t1 + log_r * ell * t2);
        out.max_tail_gap = std::max(out.max_tail_gap, std::abs(completed - out.bound) / out.bound);
    }
    return out;
}

LadderReport subcrit_ladder(double ell, int dim_N, double q_target) {
    require_exponent(ell, dim_N, "ell");
    if (!(q_target >= 1.0) || !std::isfinite(q_target)) {
        throw ArgumentError(kModule, "q_target must be at least 1");
    }
    const double ratio = dim_N / (dim_N - ell);
    LadderReport out;
    out.r = crit_r(ell, dim_N);
    out.s_values.push_back(0.0);
    double level = 1.0;
    int i = 0;
    do {
        ++i;
        out.s_values.push_back((out.s_values.back() + 1.0) * ratio - 1.0);
        level *= ratio;
        if (i > 1'000'000) throw RangeError(kModule, "ladder does not reach q_target");
    } while (!(ell * level > q_target));
    out.steps_needed = i;
    return out;
}

bool verify_bound(const Field& solution, double bound) {
    if (std::isnan(bound)) return false;
    return sup_norm(solution) <= bound;
}

bool verify_bound(const Field& solution, const MoserReport& report) {
    return verify_bound(solution, report.linf_bound);
}

bool verify_bound(const Field& solution, const CritBound& bound) { return verify_bound(solution, bound.bound); }

}  // namespace orlicz
