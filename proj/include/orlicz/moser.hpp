#pragma once

// Explicit constant chains of the Moser iterations: the homogeneous
// a-priori bound, the pointwise truncation lemma, the cutoff level for the
// nonhomogeneous weight, the subcritical ladder and the critical product.

#include "orlicz/mesh.hpp"
#include "orlicz/nfunction.hpp"

#include <span>
#include <vector>

namespace orlicz {

/// Sharp constant S in ||u||_{p*} <= S ||grad u||_p on R^N, 1 < p < N.
double talenti_constant(double p, int dim_N);

struct BetaSequence {
    double q_prime = 0.0;
    double delta = 0.0;
    std::vector<double> beta;       ///< beta_1 .. beta_kmax from the recursion
    std::vector<double> beta_star;  ///< beta_k + beta_1
    std::vector<double> beta_closed;
    std::vector<double> beta_star_closed;
    double max_rel_gap = 0.0;       ///< worst recursion / closed-form mismatch
};

/// beta_1 = q'(ell - 1), beta_k* = beta_k + beta_1, beta_{k+1} = delta beta_k*,
/// delta = ell* / (ell q'). Throws DomainError if q <= N / ell, InternalError
/// if the closed forms disagree with the recursion beyond 1e-10 relative.
BetaSequence beta_sequence(double q, double ell, int dim_N, int k_max);

struct MoserInputs {
    double q = 0.0;
    double ell = 0.0;
    double em = 0.0;
    int dim_N = 0;
    double norm_f_q = 0.0;
    double omega_measure = 0.0;
    double norm_u1_L1 = 0.0;
    double bigphi_at_one = 0.0;
    double mu = 0.0;
    double F1 = 0.0;  ///< beta_1 ln ||u||_{beta_1}; may be negative
};

struct MoserReport {
    bool m_variant = false;
    double exponent = 0.0;       ///< ell, or m for the m-variant
    double exponent_star = 0.0;
    double q_prime = 0.0;
    double delta = 0.0;
    double beta_1 = 0.0;
    std::vector<double> beta;
    std::vector<double> beta_star;
    double A = 0.0;
    double b = 0.0;
    std::vector<double> lambda;  ///< lambda_1 .. lambda_kmax
    std::vector<double> F;       ///< F_1 .. F_kmax upper-bound chain
    std::vector<double> ratio;   ///< F_k / beta_k
    double d0 = 0.0;
    double d0_truncated = 0.0;   ///< finite series at k_max
    double d0_gap = 0.0;         ///< |d0 - d0_truncated|
    double threshold_T = 1.0;
    double linf_bound = 0.0;
};

/// Iteration chain with exponent ell. Throws ArgumentError on nonpositive or
/// nonfinite inputs and DomainError if q <= N / ell.
MoserReport homog_apriori_bound(const MoserInputs& in, int k_max = 30);

/// Same chain with (m, m*) and the T^m factor in A. T is taken from the
/// equivalence threshold; throws PreconditionError if equivalent is false.
MoserReport homog_apriori_bound_m(const MoserInputs& in, const EquivalenceReport& equivalence,
                                  int k_max = 30);

/// 1 for ell <= 2, else 2^(ell/2 - 1).
double c_ell(double ell);
/// c_ell max{1, (2s + s^2)^(ell/2) / (ell s)}.
double h_weight(double s, double ell);

struct LemmaSides {
    double lhs = 0.0;
    double rhs = 0.0;
};

/// Both sides of |grad(u min{|u|^s, L})|^ell <= c_ell {...} at one point.
LemmaSides lemma_est_sides(double u, std::span<const double> grad_u, double s, double L, double ell);
/// lhs <= rhs + 1e-12 max(1, |lhs|, |rhs|). ArgumentError if s <= 0 or L <= 0.
bool lemma_est_check(double u, std::span<const double> grad_u, double s, double L, double ell);

/// 2 S c_ell (1+s)^ell / phi(1) (int_{|a| >= k} |a|^{N/ell})^{ell/N}, with the
/// integral taken over lumped nodal masses.
double cutoff_tail(const Field& a, double k, double s, double ell, int dim_N, double phi_at_one,
                   double S_embed);
/// Smallest k >= 0 with cutoff_tail <= 1/2; the infimum is attained at a
/// sorted nodal value of |a|, or 0.
double cutoff_k(const Field& a, double s, double ell, int dim_N, double phi_at_one, double S_embed);

/// r = ((ell*)^2 - ell ell* + ell^2) / (ell ell*).
double crit_r(double ell, int dim_N);

struct CritBound {
    double r = 0.0;
    double ell = 0.0;
    double k_const = 0.0;
    double base_norm = 0.0;
    double bound = 0.0;
    std::vector<double> partial;  ///< products after j = 1..20 steps
    double max_tail_gap = 0.0;    ///< worst |partial_j * exact tail - bound| / bound
};

/// k^{1/(r-1)} r^{ell r / (r-1)^2} max{base_norm, 1}; k is raised to at least
/// 1 so the nested maxima stay dominated. DomainError if r <= 1.
CritBound crit_linf_bound(double k_const, double r, double ell, double base_norm);

struct LadderReport {
    std::vector<double> s_values;  ///< s_0 = 0, ..., s_steps
    int steps_needed = 0;
    double r = 0.0;
    double k_cutoff = 0.0;
    double product_bound = 0.0;
};

/// Least i >= 1 with ell (N/(N-ell))^i > q_target and the ladder up to it.
/// k_cutoff and product_bound are left for the caller to fill.
LadderReport subcrit_ladder(double ell, int dim_N, double q_target);

/// max nodal |u| <= bound.
bool verify_bound(const Field& solution, double bound);
bool verify_bound(const Field& solution, const MoserReport& report);
bool verify_bound(const Field& solution, const CritBound& bound);

}  // namespace orlicz
