#include "orlicz/nfunction.hpp"

#include "orlicz/errors.hpp"
#include "orlicz/scalar.hpp"

#include <algorithm>
#include <array>
#include <tuple>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace orlicz {

namespace {
constexpr const char* kModule = "nfunction_core";
}

struct NFunction::State {
    Family family = Family::custom;
    std::string label;
    std::map<std::string, double> params;
    int dim = 2;
    double scale = 1.0;
    double p = 0.0, q = 0.0, gamma = 0.0, alpha = 0.0, beta = 0.0;

    // Tabulated generator: nodes, per-segment log-log slopes, Phi at nodes.
    std::vector<double> t, phi, slope, prefix;

    std::function<double(double)> custom;

    double ell = 0.0;
    double em = 0.0;
    double phi_one = 0.0;
    double bigphi_one = 0.0;
    bool closed = false;
};

std::string_view family_id(Family family) {
    switch (family) {
        case Family::power: return "power";
        case Family::power_sum: return "power_sum";
        case Family::elasticity: return "elasticity";
        case Family::plasticity: return "plasticity";
        case Family::newtonian_fluid: return "newtonian_fluid";
        case Family::tabulated: return "tabulated";
        case Family::custom: return "custom";
    }
    return "custom";
}

double sobolev_exponent(double a, int dim_N) {
    if (!(a > 0.0) || !(a < dim_N)) {
        throw DomainError(kModule, "critical exponent needs 0 < exponent < N");
    }
    return dim_N * a / (dim_N - a);
}

std::vector<double> default_index_grid() { return scalar::log_grid(1e-8, 1e8, 512); }

namespace {

using State = NFunction::State;

// Table helpers. Segment i spans [t_i, t_{i+1}] with phi = phi_i (s/t_i)^k_i.
double segment_integral(double phi_a, double t_a, double k, double a, double b) {
    // int_a^b s phi_a (s/t_a)^k ds
    if (std::abs(k + 2.0) < 1e-12) {
        return phi_a * t_a * t_a * std::log(b / a);
    }
    const double e = k + 2.0;
    return phi_a * t_a * t_a * (std::pow(b / t_a, e) - std::pow(a / t_a, e)) / e;
}

struct TablePiece {
    double t_anchor;
    double phi_anchor;
    double k;
    double prefix;  // Phi(t_anchor); for the piece below the first node, 0 at s = 0
    bool from_zero;
};

TablePiece table_piece(const State& s, double t) {
    const std::size_t n = s.t.size();
    if (t < s.t.front()) return {s.t.front(), s.phi.front(), s.slope.front(), 0.0, true};
    if (t >= s.t.back()) return {s.t.back(), s.phi.back(), s.slope.back(), s.prefix.back(), false};
    const auto it = std::upper_bound(s.t.begin(), s.t.end(), t);
    const std::size_t i = static_cast<std::size_t>(it - s.t.begin()) - 1;
    return {s.t[i], s.phi[i], s.slope[std::min(i, n - 2)], s.prefix[i], false};
}

double table_phi(const State& s, double t) {
    const TablePiece piece = table_piece(s, t);
    return piece.phi_anchor * std::pow(t / piece.t_anchor, piece.k);
}

double custom_phi_checked(const State& s, double t) {
    const double v = s.custom(t);
    if (!std::isfinite(v) || v < 0.0) {
        throw ValidationError(kModule, "generator undefined or negative at t = " + std::to_string(t));
    }
    return v;
}

double phi_of(const State& s, double t) {
    const double c = s.scale;
    switch (s.family) {
        case Family::power: return c * std::pow(t, s.p - 2.0);
        case Family::power_sum: return c * (std::pow(t, s.p - 2.0) + std::pow(t, s.q - 2.0));
        case Family::elasticity: return c * 2.0 * s.gamma * std::pow(1.0 + t * t, s.gamma - 1.0);
        case Family::plasticity: {
            const double L = std::log1p(t);
            return c * (s.alpha * std::pow(t, s.alpha - 2.0) * std::pow(L, s.beta) +
                        s.beta * std::pow(t, s.alpha - 1.0) * std::pow(L, s.beta - 1.0) / (1.0 + t));
        }
        case Family::newtonian_fluid:
            return c * std::pow(t, -s.alpha) * std::pow(std::asinh(t), s.beta);
        case Family::tabulated: return table_phi(s, t);
        case Family::custom: return custom_phi_checked(s, t);
    }
    return 0.0;
}

double phi_prime_of(const State& s, double t) {
    const double c = s.scale;
    switch (s.family) {
        case Family::power: return c * (s.p - 2.0) * std::pow(t, s.p - 3.0);
        case Family::power_sum:
            return c * ((s.p - 2.0) * std::pow(t, s.p - 3.0) + (s.q - 2.0) * std::pow(t, s.q - 3.0));
        case Family::elasticity:
            return c * 4.0 * s.gamma * (s.gamma - 1.0) * t * std::pow(1.0 + t * t, s.gamma - 2.0);
        case Family::plasticity: {
            const double a = s.alpha;
            const double b = s.beta;
            const double L = std::log1p(t);
            const double u = 1.0 + t;
            return c * (a * (a - 2.0) * std::pow(t, a - 3.0) * std::pow(L, b) +
                        a * b * std::pow(t, a - 2.0) * std::pow(L, b - 1.0) / u +
                        b * (a - 1.0) * std::pow(t, a - 2.0) * std::pow(L, b - 1.0) / u +
                        b * (b - 1.0) * std::pow(t, a - 1.0) * std::pow(L, b - 2.0) / (u * u) -
                        b * std::pow(t, a - 1.0) * std::pow(L, b - 1.0) / (u * u));
        }
        case Family::newtonian_fluid: {
            const double as = std::asinh(t);
            return c * (-s.alpha * std::pow(t, -s.alpha - 1.0) * std::pow(as, s.beta) +
                        s.beta * std::pow(t, -s.alpha) * std::pow(as, s.beta - 1.0) /
                            std::sqrt(1.0 + t * t));
        }
        case Family::tabulated: {
            const TablePiece piece = table_piece(s, t);
            return piece.k * table_phi(s, t) / t;
        }
        case Family::custom: {
            const double h = 1e-5 * t;
            return (custom_phi_checked(s, t + h) - custom_phi_checked(s, t - h)) / (2.0 * h);
        }
    }
    return 0.0;
}

double big_phi_of(const State& s, double t) {
    if (t == 0.0) return 0.0;
    const double c = s.scale;
    switch (s.family) {
        case Family::power: return c * std::pow(t, s.p) / s.p;
        case Family::power_sum: return c * (std::pow(t, s.p) / s.p + std::pow(t, s.q) / s.q);
        case Family::elasticity: return c * std::expm1(s.gamma * std::log1p(t * t));
        case Family::plasticity: return c * std::pow(t, s.alpha) * std::pow(std::log1p(t), s.beta);
        case Family::newtonian_fluid:
        case Family::custom:
            return scalar::integrate_from_zero([&s](double x) { return x * phi_of(s, x); }, t);
        case Family::tabulated: {
            const TablePiece piece = table_piece(s, t);
            if (piece.from_zero) {
                return segment_integral(piece.phi_anchor, piece.t_anchor, piece.k, 0.0, t);
            }
            return piece.prefix + segment_integral(piece.phi_anchor, piece.t_anchor, piece.k,
                                                   piece.t_anchor, t);
        }
    }
    return 0.0;
}

void require(bool ok, const std::string& what) {
    if (!ok) throw ValidationError(kModule, what);
}

void check_dim(int dim_N) { require(dim_N >= 2, "dimension N must be >= 2"); }

std::pair<double, double> measured_indices(const State& s, std::span<const double> grid) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const double t : grid) {
        const double h = 1e-5 * t;
        const double r = ((t + h) * phi_of(s, t + h) - (t - h) * phi_of(s, t - h)) / (2.0 * h * phi_of(s, t));
        if (!std::isfinite(r)) continue;
        lo = std::min(lo, r);
        hi = std::max(hi, r);
    }
    return {1.0 + lo, 1.0 + hi};
}

}  // namespace

NFunction NFunction::finish(std::shared_ptr<State> state) {
    State& s = *state;
    if (!s.closed) {
        const auto grid = default_index_grid();
        std::tie(s.ell, s.em) = measured_indices(s, grid);
    }
    s.phi_one = phi_of(s, 1.0);
    s.bigphi_one = big_phi_of(s, 1.0);
    return NFunction(std::move(state));
}

NFunction NFunction::power(double p, int dim_N, double scale) {
    check_dim(dim_N);
    require(p > 1.0, "power family needs p > 1");
    require(scale > 0.0, "scale must be positive");
    auto s = std::make_shared<State>();
    s->family = Family::power;
    s->label = "power";
    s->params = {{"p", p}, {"scale", scale}};
    s->dim = dim_N;
    s->scale = scale;
    s->p = p;
    s->ell = p;
    s->em = p;
    s->closed = true;
    return finish(std::move(s));
}

NFunction NFunction::power_sum(double p, double q, int dim_N, double scale) {
    check_dim(dim_N);
    require(p > 1.0 && p < q && q < dim_N, "power_sum family needs 1 < p < q < N");
    require(q < sobolev_exponent(p, dim_N), "power_sum family needs q < p*");
    require(scale > 0.0, "scale must be positive");
    auto s = std::make_shared<State>();
    s->family = Family::power_sum;
    s->label = "power_sum";
    s->params = {{"p", p}, {"q", q}, {"scale", scale}};
    s->dim = dim_N;
    s->scale = scale;
    s->p = p;
    s->q = q;
    s->ell = p;
    s->em = q;
    s->closed = true;
    return finish(std::move(s));
}

NFunction NFunction::elasticity(double gamma, int dim_N, double scale) {
    check_dim(dim_N);
    const double upper = dim_N == 2 ? std::numeric_limits<double>::infinity()
                                    : static_cast<double>(dim_N) / (dim_N - 2);
    require(gamma > 1.0 && gamma < upper, "elasticity family needs 1 < gamma < N/(N-2)");
    require(scale > 0.0, "scale must be positive");
    auto s = std::make_shared<State>();
    s->family = Family::elasticity;
    s->label = "elasticity";
    s->params = {{"gamma", gamma}, {"scale", scale}};
    s->dim = dim_N;
    s->scale = scale;
    s->gamma = gamma;
    // (t phi)'/phi = 1 + 2 (gamma - 1) t^2 / (1 + t^2)
    s->ell = 2.0;
    s->em = 2.0 * gamma;
    s->closed = true;
    return finish(std::move(s));
}

NFunction NFunction::plasticity(double alpha, double beta, int dim_N, double scale) {
    check_dim(dim_N);
    require(alpha >= 1.0 && beta > 0.0, "plasticity family needs alpha >= 1, beta > 0");
    require(scale > 0.0, "scale must be positive");
    auto s = std::make_shared<State>();
    s->family = Family::plasticity;
    s->label = "plasticity";
    s->params = {{"alpha", alpha}, {"beta", beta}, {"scale", scale}};
    s->dim = dim_N;
    s->scale = scale;
    s->alpha = alpha;
    s->beta = beta;
    // Phi ~ t^(alpha+beta) at 0 and t^alpha log^beta at infinity; the ratio is
    // monotone between the two limits.
    s->ell = alpha;
    s->em = alpha + beta;
    s->closed = true;
    return finish(std::move(s));
}

NFunction NFunction::newtonian_fluid(double alpha, double beta, int dim_N, double scale) {
    check_dim(dim_N);
    require(alpha >= 0.0 && alpha <= 1.0 && beta > 0.0,
            "newtonian_fluid family needs 0 <= alpha <= 1, beta > 0");
    require(scale > 0.0, "scale must be positive");
    auto s = std::make_shared<State>();
    s->family = Family::newtonian_fluid;
    s->label = "newtonian_fluid";
    s->params = {{"alpha", alpha}, {"beta", beta}, {"scale", scale}};
    s->dim = dim_N;
    s->scale = scale;
    s->alpha = alpha;
    s->beta = beta;
    // (t phi)'/phi = 1 - alpha + beta t / (sqrt(1 + t^2) asinh t)
    s->ell = 2.0 - alpha;
    s->em = 2.0 - alpha + beta;
    s->closed = true;
    return finish(std::move(s));
}

NFunction NFunction::from_catalog(std::string_view id, const std::map<std::string, double>& params,
                                  int dim_N) {
    const auto allowed = [&](std::initializer_list<const char*> names) {
        for (const auto& [key, value] : params) {
            (void)value;
            bool known = key == "scale";
            for (const char* n : names) known = known || key == n;
            if (!known) throw ValidationError(kModule, "unknown parameter '" + key + "' for family " + std::string(id));
        }
    };
    const auto get = [&](const char* name) {
        const auto it = params.find(name);
        if (it == params.end()) {
            throw ValidationError(kModule, "missing parameter '" + std::string(name) + "' for family " + std::string(id));
        }
        return it->second;
    };
    const double scale = params.count("scale") ? params.at("scale") : 1.0;
    if (id == "power") {
        allowed({"p"});
        return power(get("p"), dim_N, scale);
    }
    if (id == "power_sum") {
        allowed({"p", "q"});
        return power_sum(get("p"), get("q"), dim_N, scale);
    }
    if (id == "elasticity") {
        allowed({"gamma"});
        return elasticity(get("gamma"), dim_N, scale);
    }
    if (id == "plasticity") {
        allowed({"alpha", "beta"});
        return plasticity(get("alpha"), get("beta"), dim_N, scale);
    }
    if (id == "newtonian_fluid") {
        allowed({"alpha", "beta"});
        return newtonian_fluid(get("alpha"), get("beta"), dim_N, scale);
    }
    throw ValidationError(kModule, "unknown N-function family '" + std::string(id) + "'");
}

NFunction NFunction::from_table(std::vector<double> t, std::vector<double> phi, int dim_N) {
    check_dim(dim_N);
    require(t.size() == phi.size() && t.size() >= 2, "table needs >= 2 rows of (t, phi)");
    for (std::size_t i = 0; i < t.size(); ++i) {
        require(std::isfinite(t[i]) && t[i] > 0.0, "table t values must be positive");
        require(std::isfinite(phi[i]) && phi[i] > 0.0, "table phi values must be positive");
        if (i > 0) require(t[i] > t[i - 1], "table t values must be strictly increasing");
    }
    auto s = std::make_shared<State>();
    s->family = Family::tabulated;
    s->label = "tabulated";
    s->dim = dim_N;
    s->t = std::move(t);
    s->phi = std::move(phi);
    const std::size_t n = s->t.size();
    s->slope.resize(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        s->slope[i] = std::log(s->phi[i + 1] / s->phi[i]) / std::log(s->t[i + 1] / s->t[i]);
    }
    require(s->slope.front() > -1.0, "table generator must satisfy t phi(t) -> 0 at 0");
    s->prefix.resize(n);
    s->prefix[0] = segment_integral(s->phi[0], s->t[0], s->slope[0], 0.0, s->t[0]);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        s->prefix[i + 1] = s->prefix[i] + segment_integral(s->phi[i], s->t[i], s->slope[i], s->t[i], s->t[i + 1]);
    }
    // phi is a piecewise power, so (t phi)'/phi = 1 + slope on each piece.
    const auto [kmin, kmax] = std::minmax_element(s->slope.begin(), s->slope.end());
    s->ell = 2.0 + *kmin;
    s->em = 2.0 + *kmax;
    s->closed = true;
    s->params = {{"rows", static_cast<double>(n)}};
    return finish(std::move(s));
}

NFunction NFunction::from_table_file(const std::string& path, int dim_N) {
    std::ifstream in(path);
    if (!in) throw ValidationError(kModule, "cannot open table file " + path);
    std::vector<double> t;
    std::vector<double> phi;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream row(line);
        double a = 0.0;
        double b = 0.0;
        if (!(row >> a)) continue;
        std::string extra;
        if (!(row >> b) || (row >> extra)) {
            throw ValidationError(kModule, path + ":" + std::to_string(lineno) + ": expected two columns");
        }
        t.push_back(a);
        phi.push_back(b);
    }
    return from_table(std::move(t), std::move(phi), dim_N);
}

NFunction NFunction::from_generator(std::function<double(double)> phi, int dim_N, std::string label) {
    check_dim(dim_N);
    require(static_cast<bool>(phi), "generator must be callable");
    auto s = std::make_shared<State>();
    s->family = Family::custom;
    s->label = std::move(label);
    s->dim = dim_N;
    s->custom = std::move(phi);
    s->closed = false;
    return finish(std::move(s));
}

double NFunction::phi(double t) const { return phi_of(*state_, t); }
double NFunction::phi_prime(double t) const { return phi_prime_of(*state_, t); }

double NFunction::big_phi(double t) const {
    if (!(t >= 0.0) || !std::isfinite(t)) {
        throw ArgumentError(kModule, "big_phi needs finite t >= 0");
    }
    return big_phi_of(*state_, t);
}

double NFunction::big_phi_prime(double t) const { return t == 0.0 ? 0.0 : t * phi_of(*state_, t); }

double NFunction::inverse(double s) const {
    if (!(s >= 0.0)) throw ArgumentError(kModule, "inverse needs s >= 0");
    if (s == 0.0) return 0.0;
    const auto above = [&](double t) { return big_phi(t) >= s; };
    double lo = 0.0;
    double hi = 0.0;
    if (big_phi(1.0) >= s) {
        const auto below = scalar::shrink_until([&](double t) { return big_phi(t) < s; }, 1.0);
        if (!below) throw RangeError(kModule, "inverse: no lower bracket");
        lo = *below;
        hi = 2.0 * lo;
    } else {
        const auto top = scalar::grow_until(above, 1.0);
        if (!top) throw RangeError(kModule, "inverse: Phi stays below target");
        hi = *top;
        lo = 0.5 * hi;
    }
    return scalar::find_root([&](double t) { return big_phi(t) - s; },
                             scalar::Fn([this](double t) { return big_phi_prime(t); }), lo, hi, s);
}

Family NFunction::family() const { return state_->family; }
const std::string& NFunction::label() const { return state_->label; }
const std::map<std::string, double>& NFunction::params() const { return state_->params; }
int NFunction::dim() const { return state_->dim; }
double NFunction::ell() const { return state_->ell; }
double NFunction::em() const { return state_->em; }
double NFunction::ell_star() const { return sobolev_exponent(state_->ell, state_->dim); }
double NFunction::em_star() const { return sobolev_exponent(state_->em, state_->dim); }
double NFunction::phi_at_one() const { return state_->phi_one; }
double NFunction::bigphi_at_one() const { return state_->bigphi_one; }
bool NFunction::closed_form_indices() const { return state_->closed; }

std::optional<AsymptoticGrowth> NFunction::growth_at_infinity() const {
    const State& s = *state_;
    switch (s.family) {
        case Family::power: return AsymptoticGrowth{s.p, 0.0};
        case Family::power_sum: return AsymptoticGrowth{s.q, 0.0};
        case Family::elasticity: return AsymptoticGrowth{2.0 * s.gamma, 0.0};
        case Family::plasticity: return AsymptoticGrowth{s.alpha, s.beta};
        case Family::newtonian_fluid: return AsymptoticGrowth{2.0 - s.alpha, s.beta};
        case Family::tabulated: return AsymptoticGrowth{s.slope.back() + 2.0, 0.0};
        case Family::custom: return std::nullopt;
    }
    return std::nullopt;
}

double index_ratio(const NFunction& nf, double t) {
    const double h = 1e-5 * t;
    return ((t + h) * nf.phi(t + h) - (t - h) * nf.phi(t - h)) / (2.0 * h * nf.phi(t));
}

ConditionReport check_conditions(const NFunction& nf, std::span<const double> grid) {
    if (grid.size() < 64) throw ArgumentError(kModule, "check_conditions: grid needs >= 64 points");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!(grid[i] > 0.0) || (i > 0 && !(grid[i] > grid[i - 1]))) {
            throw ArgumentError(kModule, "check_conditions: grid must be positive and strictly increasing");
        }
    }
    if (grid.back() / grid.front() < 1e8 * (1.0 - 1e-12)) {
        throw ArgumentError(kModule, "check_conditions: grid must span >= 8 decades");
    }

    ConditionReport report;
    const std::size_t n = grid.size();
    std::vector<double> flux(n);
    for (std::size_t i = 0; i < n; ++i) flux[i] = nf.big_phi_prime(grid[i]);

    report.phi2 = true;
    for (std::size_t i = 1; i < n; ++i) {
        if (!(flux[i] > flux[i - 1])) report.phi2 = false;
    }

    // Trend at the grid extremes: a positive log-slope of t phi(t) at the
    // small end sends it to 0, at the large end to infinity.
    constexpr double kSlopeFloor = 1e-3;
    const auto log_slope = [&](std::size_t a, std::size_t b) {
        return std::log(flux[b] / flux[a]) / std::log(grid[b] / grid[a]);
    };
    const double low = log_slope(0, 2);
    const double high = log_slope(n - 3, n - 1);
    report.phi1 = std::isfinite(low) && std::isfinite(high) && low > kSlopeFloor && high > kSlopeFloor &&
                  flux[0] < flux[1] && flux[n - 2] < flux[n - 1];

    report.ratio_min = std::numeric_limits<double>::infinity();
    report.ratio_max = -std::numeric_limits<double>::infinity();
    bool finite = true;
    for (const double t : grid) {
        const double r = index_ratio(nf, t);
        if (!std::isfinite(r)) {
            finite = false;
            continue;
        }
        report.ratio_min = std::min(report.ratio_min, r);
        report.ratio_max = std::max(report.ratio_max, r);
    }
    constexpr double kRatioTol = 1e-6;
    report.phi3_ratio = finite && report.ratio_min >= nf.ell() - 1.0 - kRatioTol &&
                        report.ratio_max <= nf.em() - 1.0 + kRatioTol;

    const double N = nf.dim();
    report.phi3_dimension = nf.ell() >= 1.0 - 1e-12 && nf.ell() < N && nf.em() > 1.0 && nf.em() < N &&
                            nf.em() < nf.ell_star();
    report.phi3 = report.phi3_ratio && report.phi3_dimension;
    report.passes = report.phi1 && report.phi2 && report.phi3;
    return report;
}

IndexEstimate simonenko_indices(const NFunction& nf, std::span<const double> grid) {
    if (!check_conditions(nf, grid).passes) {
        throw PreconditionError(kModule, "simonenko_indices: (phi1)-(phi3) do not hold on the grid");
    }
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const double t : grid) {
        const double r = index_ratio(nf, t);
        lo = std::min(lo, r);
        hi = std::max(hi, r);
    }
    IndexEstimate est{};
    est.grid_ell = 1.0 + lo;
    est.grid_em = 1.0 + hi;
    est.closed_form = nf.closed_form_indices();
    est.ell_hat = est.closed_form ? nf.ell() : est.grid_ell;
    est.em_hat = est.closed_form ? nf.em() : est.grid_em;
    return est;
}

double conjugate(const NFunction& nf, double t) {
    if (!(t >= 0.0)) throw ArgumentError(kModule, "conjugate needs t >= 0");
    if (t == 0.0) return 0.0;
    const auto top = scalar::grow_until([&](double s) { return nf.big_phi_prime(s) > t; }, 1.0);
    if (!top) throw RangeError(kModule, "conjugate: maximizer bracket not found below overflow");
    const double hi = *top;
    const double lo = 0.0;
    double s_star = 0.0;
    try {
        s_star = scalar::find_root(
            [&](double s) { return nf.big_phi_prime(s) - t; },
            scalar::Fn([&](double s) { return nf.phi(s) + s * nf.phi_prime(s); }), lo, hi, t);
    } catch (const RangeError&) {
        s_star = scalar::maximize_unimodal([&](double s) { return t * s - nf.big_phi(s); }, lo, hi);
    }
    return t * s_star - nf.big_phi(s_star);
}

double sobolev_primitive(const NFunction& nf, double t) {
    if (t == 0.0) return 0.0;
    if (!(t > 0.0)) throw ArgumentError(kModule, "sobolev_primitive needs t >= 0");
    const double N = nf.dim();
    // In x = ln s the integrand is Phi^{-1}(e^x) e^{-x/N}. Below s0 = t e^{-W}
    // Phi^{-1} is replaced by its local power fit c s^a, integrated exactly.
    constexpr double kWindow = 69.0;
    const double x1 = std::log(t);
    const double x0 = x1 - kWindow;
    const double s0 = std::exp(x0);
    const double inv0 = nf.inverse(s0);
    const double a = std::log(inv0 / nf.inverse(0.5 * s0)) / std::log(2.0);
    const double kappa = a - 1.0 / N;
    if (!(kappa > 0.0)) {
        throw UnsupportedError(kModule, "sobolev_primitive: integrand not integrable at 0");
    }
    const double tail = inv0 * std::pow(s0, -1.0 / N) / kappa;
    const double body = scalar::integrate(
        [&](double x) { return nf.inverse(std::exp(x)) * std::exp(-x / N); }, x0, x1,
        scalar::QuadratureTolerance{1e-300, 1e-11, 30});
    return tail + body;
}

namespace {

void require_sobolev_case(const NFunction& nf) {
    if (nf.ell() <= 1.0 + 1e-12) {
        throw UnsupportedError(kModule, "sobolev_conjugate requires ell > 1");
    }
    if (!(nf.em() < nf.dim())) {
        throw UnsupportedError(kModule, "sobolev_conjugate requires em < N");
    }
}

}  // namespace

double sobolev_conjugate(const NFunction& nf, double t) {
    require_sobolev_case(nf);
    t = std::abs(t);
    if (t == 0.0) return 0.0;
    const double N = nf.dim();
    const double log_t = std::log(t);
    // Solve ln G(e^z) = ln t, monotone increasing in z.
    const auto F = [&](double z) { return std::log(sobolev_primitive(nf, std::exp(z))) - log_t; };
    const auto dF = [&](double z) {
        const double y = std::exp(z);
        return nf.inverse(y) * std::pow(y, -1.0 / N) / sobolev_primitive(nf, y);
    };
    double lo = 0.0;
    double hi = 0.0;
    double f0 = F(0.0);
    constexpr double kStep = 8.0;
    if (f0 < 0.0) {
        hi = kStep;
        while (F(hi) < 0.0) {
            lo = hi;
            hi += kStep;
            if (hi > 690.0) throw RangeError(kModule, "sobolev_conjugate: overflow");
        }
    } else {
        lo = -kStep;
        while (F(lo) > 0.0) {
            hi = lo;
            lo -= kStep;
            if (lo < -690.0) throw RangeError(kModule, "sobolev_conjugate: underflow");
        }
    }
    const double z = scalar::find_root(F, scalar::Fn(dF), lo, hi, 1.0,
                                       scalar::RootOptions{1e-13, 1e-15, 200});
    return std::exp(z);
}

double sobolev_conjugate_log_derivative(const NFunction& nf, double t) {
    t = std::abs(t);
    const double y = sobolev_conjugate(nf, t);
    // Phi_*' = 1 / G'(Phi_*) = Phi_*^{1 + 1/N} / Phi^{-1}(Phi_*).
    return t * std::pow(y, 1.0 / nf.dim()) / nf.inverse(y);
}

double delta2_constant(const NFunction& nf, double t0, double t_max) {
    if (!(t0 >= 0.0) || !(t0 < t_max)) throw ArgumentError(kModule, "delta2_constant needs 0 <= t0 < t_max");
    const double lo = std::max(t0, 1e-8);
    if (!(lo < t_max)) throw ArgumentError(kModule, "delta2_constant: empty sampling range");
    double sup = 0.0;
    for (const double t : scalar::log_grid(lo, t_max, 512)) {
        sup = std::max(sup, nf.big_phi(2.0 * t) / nf.big_phi(t));
    }
    return sup;
}

bool zeta_sandwich(double lo, double hi, double f_rho, double f_rho_t, double t, double rel_tol) {
    const double a = std::pow(t, lo);
    const double b = std::pow(t, hi);
    const double zeta0 = std::min(a, b);
    const double zeta1 = std::max(a, b);
    return zeta0 * f_rho <= f_rho_t * (1.0 + rel_tol) && f_rho_t <= zeta1 * f_rho * (1.0 + rel_tol);
}

bool zeta_bounds_check(const NFunction& nf, double rho, double t) {
    return zeta_sandwich(nf.ell(), nf.em(), nf.big_phi(rho), nf.big_phi(rho * t), t);
}

double h_smp(const NFunction& nf, double t) {
    if (t == 0.0) return 0.0;
    return t * t * nf.phi(t) - nf.big_phi(t);
}

EquivalenceReport equivalence_check(const NFunction& a, const NFunction& b, std::span<const double> grid,
                                    double t0) {
    EquivalenceReport report;
    report.t0 = t0;
    report.c1 = std::numeric_limits<double>::infinity();
    report.c2 = 0.0;
    double t_max = 0.0;
    int used = 0;
    for (const double t : grid) {
        if (t < t0) continue;
        const double r = a.big_phi(t) / b.big_phi(t);
        report.c1 = std::min(report.c1, r);
        report.c2 = std::max(report.c2, r);
        t_max = std::max(t_max, t);
        ++used;
    }
    if (used < 2) throw ArgumentError(kModule, "equivalence_check: fewer than two grid points >= t0");

    const auto ga = a.growth_at_infinity();
    const auto gb = b.growth_at_infinity();
    bool tail_ok = false;
    if (ga && gb) {
        report.method = "asymptotic";
        tail_ok = std::abs(ga->exponent - gb->exponent) < 1e-12 && std::abs(ga->log_power - gb->log_power) < 1e-12;
    } else {
        // Decade increments of log(Phi_a/Phi_b) over the top four decades must
        // shrink geometrically (or vanish) for the ratio to have a finite
        // positive limit.
        report.method = "numeric";
        std::array<double, 5> logr{};
        for (int k = 0; k < 5; ++k) {
            const double t = t_max * std::pow(10.0, k - 4);
            logr[static_cast<std::size_t>(k)] = std::log(a.big_phi(t) / b.big_phi(t));
        }
        std::array<double, 4> inc{};
        for (int k = 0; k < 4; ++k) inc[static_cast<std::size_t>(k)] = logr[k + 1] - logr[k];
        tail_ok = true;
        for (int k = 1; k < 4; ++k) {
            const double prev = std::abs(inc[k - 1]);
            const double cur = std::abs(inc[k]);
            if (cur > 1e-9 && cur > 0.8 * prev) tail_ok = false;
        }
    }
    report.equivalent = tail_ok && std::isfinite(report.c1) && std::isfinite(report.c2) && report.c1 > 0.0;
    return report;
}

}  // namespace orlicz
