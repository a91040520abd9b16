#pragma once

#include <functional>

namespace barostab {

/// Adaptive Gauss-Kronrod 7-15 quadrature. A subinterval is accepted when
/// the embedded error estimate drops below max(abs_tol, rel_tol |estimate|);
/// the relative branch keeps blow-up integrands (hard-sphere pressure near
/// rho_bar) convergent where an absolute target is unrepresentable. Throws
/// QuadratureFailure when the bisection depth limit is hit first.
double integrate_gk(const std::function<double(double)>& f, double a, double b,
                    double abs_tol = 1e-12, double rel_tol = 1e-12, int max_depth = 30);

}  // namespace barostab
