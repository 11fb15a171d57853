#include "orlicz/scalar.hpp"

#include "orlicz/errors.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/minima.hpp>

#include <cmath>
#include <limits>
#include <vector>

namespace orlicz::scalar {

namespace {

using Kronrod = boost::math::quadrature::gauss_kronrod<double, 15>;
using Gauss = boost::math::quadrature::gauss<double, 7>;

double integrate_panel(const Fn& f, double a, double b, QuadratureTolerance tol, int depth) {
    // Embedded-pair estimate; Boost's own estimate has an absolute floor.
    const double value = Kronrod::integrate(f, a, b, 0, 0.0);
    const double err = std::abs(value - Gauss::integrate(f, a, b));
    if (err <= std::max(tol.absolute, tol.relative * std::abs(value)) || depth >= tol.max_depth) {
        return value;
    }
    const double mid = 0.5 * (a + b);
    return integrate_panel(f, a, mid, tol, depth + 1) + integrate_panel(f, mid, b, tol, depth + 1);
}

}  // namespace

double integrate(const Fn& f, double a, double b, QuadratureTolerance tol) {
    if (a == b) return 0.0;
    if (!(std::isfinite(a) && std::isfinite(b))) {
        throw ArgumentError("scalar", "integrate: limits must be finite");
    }
    return integrate_panel(f, a, b, tol, 0);
}

double integrate_from_zero(const Fn& f, double b, int panels, QuadratureTolerance tol) {
    if (b <= 0.0) return 0.0;
    double sum = 0.0;
    for (int k = 0; k < panels; ++k) {
        const double piece = integrate(f, std::ldexp(b, -(k + 1)), std::ldexp(b, -k), tol);
        sum += piece;
        if (std::abs(piece) <= 1e-17 * std::abs(sum)) return sum;
    }
    return sum + integrate(f, 0.0, std::ldexp(b, -panels), tol);
}

double find_root(const Fn& f, const std::optional<Fn>& df, double lo, double hi, double scale,
                 RootOptions opts) {
    double flo = f(lo);
    double fhi = f(hi);
    const double resid = opts.residual_tol * std::max(std::abs(scale), std::numeric_limits<double>::min());
    if (std::abs(flo) <= resid) return lo;
    if (std::abs(fhi) <= resid) return hi;
    if ((flo > 0.0) == (fhi > 0.0)) {
        throw RangeError("scalar", "find_root: bracket does not straddle a root");
    }
    // Orient so that f(lo) < 0 < f(hi).
    const bool increasing = flo < 0.0;
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < opts.max_iter; ++it) {
        const double fx = f(x);
        if (!std::isfinite(fx)) {
            throw RangeError("scalar", "find_root: non-finite function value");
        }
        if (std::abs(fx) <= resid) return x;
        if ((fx < 0.0) == increasing) {
            lo = x;
        } else {
            hi = x;
        }
        if (std::abs(hi - lo) <= opts.x_rel_tol * std::max(std::abs(lo), std::abs(hi))) {
            return 0.5 * (lo + hi);
        }
        double next = 0.5 * (lo + hi);
        if (df) {
            const double d = (*df)(x);
            if (d != 0.0 && std::isfinite(d)) {
                const double newton = x - fx / d;
                if (newton > std::min(lo, hi) && newton < std::max(lo, hi)) next = newton;
            }
        }
        x = next;
    }
    return x;
}

std::optional<double> grow_until(const std::function<bool(double)>& pred, double hi, double factor,
                                 double limit) {
    while (hi <= limit) {
        if (pred(hi)) return hi;
        hi *= factor;
    }
    return std::nullopt;
}

std::optional<double> shrink_until(const std::function<bool(double)>& pred, double lo, double factor,
                                   double limit) {
    while (lo >= limit) {
        if (pred(lo)) return lo;
        lo /= factor;
    }
    return std::nullopt;
}

double maximize_unimodal(const Fn& f, double lo, double hi) {
    const auto neg = [&f](double x) { return -f(x); };
    const auto [xmin, fmin] =
        boost::math::tools::brent_find_minima(neg, lo, hi, std::numeric_limits<double>::digits / 2);
    (void)fmin;
    return xmin;
}

std::vector<double> log_grid(double lo, double hi, int n) {
    if (n < 2 || !(lo > 0.0) || !(hi > lo)) {
        throw ArgumentError("scalar", "log_grid: need n >= 2 and 0 < lo < hi");
    }
    std::vector<double> grid(static_cast<std::size_t>(n));
    const double a = std::log(lo);
    const double b = std::log(hi);
    for (int i = 0; i < n; ++i) {
        grid[static_cast<std::size_t>(i)] = std::exp(a + (b - a) * i / (n - 1));
    }
    grid.front() = lo;
    grid.back() = hi;
    return grid;
}

}  // namespace orlicz::scalar
