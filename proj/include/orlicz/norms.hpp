#pragma once

// Modulars and Luxemburg norms of P1 fields, plus the Poincare check.

#include "orlicz/mesh.hpp"
#include "orlicz/nfunction.hpp"

#include <map>
#include <vector>

namespace orlicz {

struct NormReport {
    double modular = 0.0;
    double luxemburg = 0.0;
    double grad_luxemburg = 0.0;
    std::map<double, double> lp_values;
};

struct PoincareReport {
    bool holds = false;
    double lhs = 0.0;  // ||u||_Phi
    double rhs = 0.0;  // 2 d ||grad u||_Phi
    double diameter = 0.0;
};

/// int Phi(|u|) by the mesh quadrature rule.
double modular(const Field& u, const NFunction& nf);
/// Same, for raw nodal values; throws ArgumentError on a size mismatch.
double modular(const Eigen::VectorXd& values, const NFunction& nf, const std::shared_ptr<const Mesh>& mesh);

/// int Phi(|grad u|), exact for the elementwise constant gradient.
double grad_modular(const Field& u, const NFunction& nf);

/// inf { lambda > 0 : int Phi(|u| / lambda) <= 1 }, relative tolerance 1e-10.
double luxemburg_norm(const Field& u, const NFunction& nf);
double grad_luxemburg_norm(const Field& u, const NFunction& nf);

/// (int |u|^p)^{1/p} on the same quadrature; p = +inf gives sup_norm.
double lp_norm(const Field& u, double p);
/// max |u| over nodes, which is the sup of the P1 interpolant.
double sup_norm(const Field& u);

NormReport norm_report(const Field& u, const NFunction& nf, const std::vector<double>& exponents = {});

/// ||u||_Phi <= 2 d ||grad u||_Phi with slack factor 1 + 1e-8. Throws
/// PreconditionError if u is nonzero on a boundary node.
PoincareReport poincare_report(const Field& u, const NFunction& nf);
bool poincare_check(const Field& u, const NFunction& nf);

}  // namespace orlicz
