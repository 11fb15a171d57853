#pragma once

// N-functions Phi(t) = int_0^t s phi(s) ds built from a generator phi, the
// structural checks on phi, and the scalar Orlicz calculus around them
// (conjugates, Simonenko indices, Delta_2 constant, equivalence).

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace orlicz {

enum class Family { power, power_sum, elasticity, plasticity, newtonian_fluid, tabulated, custom };

std::string_view family_id(Family family);

/// Growth of Phi at infinity as coefficient * t^exponent * (log t)^log_power.
/// Known exactly for catalog and tabulated generators.
struct AsymptoticGrowth {
    double exponent;
    double log_power;
};

/// An N-function given by its generator phi. Immutable; copies share state.
///
/// Catalog members use closed forms for phi, phi', Phi and for the indices
/// (ell, em). Tabulated generators are interpolated log-log linearly, so phi
/// is a piecewise power and Phi is integrated exactly. Custom generators are
/// arbitrary callables; Phi comes from quadrature and (ell, em) are measured
/// on the default index grid.
class NFunction {
public:
    /// Phi(t) = scale * t^p / p, p > 1.
    static NFunction power(double p, int dim_N, double scale = 1.0);
    /// Phi(t) = scale * (t^p / p + t^q / q), 1 < p < q < N, q < p*.
    static NFunction power_sum(double p, double q, int dim_N, double scale = 1.0);
    /// Phi(t) = scale * ((1 + t^2)^gamma - 1), 1 < gamma < N / (N - 2).
    static NFunction elasticity(double gamma, int dim_N, double scale = 1.0);
    /// Phi(t) = scale * t^alpha * log(1 + t)^beta, alpha >= 1, beta > 0.
    static NFunction plasticity(double alpha, double beta, int dim_N, double scale = 1.0);
    /// Phi(t) = scale * int_0^t s^(1-alpha) asinh(s)^beta ds, 0 <= alpha <= 1, beta > 0.
    static NFunction newtonian_fluid(double alpha, double beta, int dim_N, double scale = 1.0);

    /// Catalog lookup by string id ("power", "power_sum", "elasticity",
    /// "plasticity", "newtonian_fluid") and parameter names
    /// (p, q, gamma, alpha, beta, scale). Unknown ids or parameters throw.
    static NFunction from_catalog(std::string_view id, const std::map<std::string, double>& params,
                                  int dim_N);

    /// Generator sampled at strictly increasing t > 0 with phi > 0.
    static NFunction from_table(std::vector<double> t, std::vector<double> phi, int dim_N);
    /// Two-column text file (t, phi(t)); '#' starts a comment.
    static NFunction from_table_file(const std::string& path, int dim_N);

    static NFunction from_generator(std::function<double(double)> phi, int dim_N,
                                    std::string label = "custom");

    [[nodiscard]] double phi(double t) const;
    [[nodiscard]] double phi_prime(double t) const;
    [[nodiscard]] double big_phi(double t) const;
    /// Phi'(t) = t phi(t).
    [[nodiscard]] double big_phi_prime(double t) const;
    /// Phi^{-1}(s) for s >= 0.
    [[nodiscard]] double inverse(double s) const;

    [[nodiscard]] Family family() const;
    [[nodiscard]] const std::string& label() const;
    [[nodiscard]] const std::map<std::string, double>& params() const;
    [[nodiscard]] int dim() const;
    [[nodiscard]] double ell() const;
    [[nodiscard]] double em() const;
    /// N ell / (N - ell); throws DomainError when ell >= N.
    [[nodiscard]] double ell_star() const;
    [[nodiscard]] double em_star() const;
    [[nodiscard]] double phi_at_one() const;
    [[nodiscard]] double bigphi_at_one() const;
    [[nodiscard]] bool closed_form_indices() const;
    [[nodiscard]] std::optional<AsymptoticGrowth> growth_at_infinity() const;

    struct State;

private:
    explicit NFunction(std::shared_ptr<const State> state) : state_(std::move(state)) {}
    static NFunction finish(std::shared_ptr<State> state);

    std::shared_ptr<const State> state_;
};

/// N * a / (N - a); DomainError unless 0 < a < N.
double sobolev_exponent(double a, int dim_N);

/// Default log grid for index estimation: 512 points on [1e-8, 1e8].
std::vector<double> default_index_grid();

struct ConditionReport {
    bool phi1 = false;          ///< t phi(t) -> 0 at 0 and -> infinity at infinity (trend test)
    bool phi2 = false;          ///< t phi(t) strictly increasing on the grid
    bool phi3_ratio = false;    ///< ell - 1 <= (t phi)'/phi <= em - 1 on the grid
    bool phi3_dimension = false;///< 1 <= ell < N, 1 < em < N, em < ell*
    bool phi3 = false;
    double ratio_min = 0.0;
    double ratio_max = 0.0;
    bool passes = false;
};

/// Checks (phi1)-(phi3) on a log-spaced grid. The grid must be sorted, hold at
/// least 64 points and span at least 8 decades.
ConditionReport check_conditions(const NFunction& nf, std::span<const double> grid);

/// Central-difference estimate of (t phi(t))' / phi(t), relative step 1e-5.
double index_ratio(const NFunction& nf, double t);

struct IndexEstimate {
    double ell_hat;
    double em_hat;
    double grid_ell;  ///< 1 + inf of the difference ratio on the grid
    double grid_em;   ///< 1 + sup of the difference ratio on the grid
    bool closed_form; ///< ell_hat/em_hat taken from closed forms
};

/// Global indices. Closed forms win for catalog and tabulated generators;
/// the grid measurement is always reported alongside.
IndexEstimate simonenko_indices(const NFunction& nf, std::span<const double> grid);

/// Complementary function max_{s >= 0} (t s - Phi(s)).
double conjugate(const NFunction& nf, double t);

/// Sobolev conjugate Phi_*(t): inverse of G(t) = int_0^t Phi^{-1}(s) s^{-(N+1)/N} ds,
/// extended evenly to t < 0. Requires ell > 1.
double sobolev_conjugate(const NFunction& nf, double t);
/// G(t) itself.
double sobolev_primitive(const NFunction& nf, double t);
/// t Phi_*'(t) / Phi_*(t) from G' evaluated at Phi_*(t).
double sobolev_conjugate_log_derivative(const NFunction& nf, double t);

/// sup of Phi(2t)/Phi(t) over a 512-point log grid on [max(t0, 1e-8), t_max].
double delta2_constant(const NFunction& nf, double t0, double t_max);

/// zeta_0(t) F(rho) <= F(rho t) <= zeta_1(t) F(rho) with zeta built from
/// exponents (lo, hi), relative tolerance rel_tol.
bool zeta_sandwich(double lo, double hi, double f_rho, double f_rho_t, double t,
                   double rel_tol = 1e-9);

/// Sandwich of Phi with (ell, em).
bool zeta_bounds_check(const NFunction& nf, double rho, double t);

/// t^2 phi(t) - Phi(t).
double h_smp(const NFunction& nf, double t);

struct EquivalenceReport {
    bool equivalent = false;
    double c1 = 0.0;
    double c2 = 0.0;
    double t0 = 1.0;
    std::string method;  ///< "asymptotic" or "numeric"
};

/// Estimates c1 = inf, c2 = sup of Phi1/Phi2 on grid points >= t0. Equivalence
/// is decided from the exact growth at infinity when both are known, else
/// from geometric decay of the decade increments of log(Phi1/Phi2).
EquivalenceReport equivalence_check(const NFunction& a, const NFunction& b,
                                    std::span<const double> grid, double t0 = 1.0);

}  // namespace orlicz
