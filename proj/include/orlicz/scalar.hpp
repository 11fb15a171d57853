#pragma once

// Scalar numerics shared by the N-function calculus and the norm routines:
// adaptive quadrature, safeguarded root finding and 1-D maximization.

#include <functional>
#include <optional>
#include <vector>

namespace orlicz::scalar {

using Fn = std::function<double(double)>;

struct QuadratureTolerance {
    double absolute = 1e-300;
    double relative = 1e-10;
    int max_depth = 40;
};

/// Adaptive Gauss-Kronrod (7/15) integral of f over [a, b]. Panels are
/// bisected until the Kronrod error estimate satisfies the tolerance.
double integrate(const Fn& f, double a, double b, QuadratureTolerance tol = {});

/// Integral over [0, b] on dyadic panels [b 2^-(k+1), b 2^-k], k < panels,
/// which keeps relative accuracy for integrands with a power-law zero or
/// singularity at the origin. The remaining piece [0, b 2^-panels] is
/// integrated directly. For nondecreasing integrands the piece left of a
/// panel is bounded by that panel, so panels stop once one falls below
/// 1e-17 of the running sum.
double integrate_from_zero(const Fn& f, double b, int panels = 60,
                           QuadratureTolerance tol = {});

struct RootOptions {
    double residual_tol = 1e-12;  ///< relative to |target| scale, see find_root
    double x_rel_tol = 1e-15;
    int max_iter = 200;
};

/// Solves f(x) = 0 on a bracket [lo, hi] with f(lo), f(hi) of opposite sign.
/// Newton steps are taken when df is supplied and the step stays inside the
/// current bracket; bisection otherwise. Stops when |f| <= residual_tol*scale
/// or the bracket collapses.
double find_root(const Fn& f, const std::optional<Fn>& df, double lo, double hi,
                 double scale = 1.0, RootOptions opts = {});

/// Grows hi geometrically by `factor` until pred(hi) holds or hi exceeds
/// `limit`; returns the first hi with pred(hi), or nullopt.
std::optional<double> grow_until(const std::function<bool(double)>& pred, double hi,
                                 double factor = 2.0, double limit = 1e300);

/// Shrinks lo geometrically until pred(lo) holds or lo drops below `limit`.
std::optional<double> shrink_until(const std::function<bool(double)>& pred, double lo,
                                   double factor = 2.0, double limit = 1e-300);

/// Golden-section/Brent maximization of a unimodal function on [lo, hi].
/// Returns the maximizer.
double maximize_unimodal(const Fn& f, double lo, double hi);

/// Log-spaced grid of n points on [lo, hi], endpoints included.
std::vector<double> log_grid(double lo, double hi, int n);

}  // namespace orlicz::scalar
