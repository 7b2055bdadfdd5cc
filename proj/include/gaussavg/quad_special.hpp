#pragma once

#include <functional>
#include <vector>

namespace gaussavg {

// Nodes and weights for the weight e^{-t} t^alpha on (0, inf).
struct QuadratureRule {
    double alpha = 0.0;
    std::vector<double> nodes;
    std::vector<double> weights;

    double integrate(const std::function<double(double)>& g) const;
};

// Generalized Gauss-Laguerre rule by Golub-Welsch: the Jacobi matrix of the
// Laguerre recurrence (diagonal 2j+alpha+1, off-diagonal sqrt(j(j+alpha)))
// is diagonalized by implicit-shift QL tracking only the first eigenvector
// row; weights are Gamma(alpha+1) times the squared first components.
QuadratureRule gauss_laguerre(double alpha, int n_nodes);

// Adaptive evaluation of integral_0^inf e^{-t} t^alpha g(t) dt. The node
// count doubles from start_nodes up to 1024 until two successive estimates
// agree to rel_tol; throws ToleranceNotMet otherwise.
struct AdaptiveQuadResult {
    double value = 0.0;
    int nodes_used = 0;
};
AdaptiveQuadResult integrate_exp_weight_adaptive(
    const std::function<double(double)>& g, double alpha, double rel_tol,
    int start_nodes = 32);
double integrate_exp_weight(const std::function<double(double)>& g,
                            double alpha, double rel_tol);

// E1(x) = integral_x^inf e^{-t}/t dt. Power series below the crossover at
// x = 1, modified-Lentz continued fraction above it.
double exp_integral_e1(double x);

// e^x * E1(x), finite for all x > 0 (E1 alone underflows near x ~ 700).
double exp_integral_e1_scaled(double x);

// K_p(d) = integral_0^inf e^{-t} t^p / (1 + t d) dt.
// I_p(d) = integral_0^inf e^{-t} t^p log(1 + t d) dt.
// Closed forms ride the E1 recurrences when they are stable (p = 0, or
// d >= 0.5); smaller d falls back to quadrature because the forward
// recurrence K_p = ((p-1)! - K_{p-1})/d amplifies error by 1/d per step.
double rational_moment_closed(int p, double d);
double log_moment_closed(int p, double d);

}  // namespace gaussavg
