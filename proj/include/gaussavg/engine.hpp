#pragma once

#include <string>
#include <vector>

#include "gaussavg/schur.hpp"

namespace gaussavg {

// Eigenvalues of the positive definite coupling matrix. The averages
// depend on the matrix only through its spectrum (unitary invariance of
// the Gaussian measure), so this is the engine's only matrix input.
class Spectrum {
  public:
    explicit Spectrum(std::vector<double> eigenvalues);

    const std::vector<double>& eigenvalues() const { return eigs_; }
    int n() const { return static_cast<int>(eigs_.size()); }
    double min_rel_gap() const { return min_rel_gap_; }
    bool degenerate() const { return min_rel_gap_ < kDegenerateRelGap; }

    // Spectrum of factor*A; relative gaps are unchanged.
    Spectrum scaled(double factor) const;

  private:
    std::vector<double> eigs_;
    double min_rel_gap_;
};

// The admissible scalar functions f. Admissibility (continuity and
// polynomial boundedness) is structural: every representable kind
// qualifies, so no runtime check exists. Arbitrary callables are
// deliberately not representable.
class ScalarFunction {
  public:
    enum class Kind { Monomial, Polynomial, Capacity, Mmse };

    static ScalarFunction monomial(int m);
    static ScalarFunction polynomial(std::vector<double> coefficients);
    static ScalarFunction capacity(double snr);   // x -> log(1 + snr x)
    static ScalarFunction mmse(double snr);       // x -> 1/(1 + snr x)

    Kind kind() const { return kind_; }
    int degree() const { return degree_; }  // Monomial only
    double snr() const { return snr_; }     // Capacity/Mmse only
    const std::vector<double>& coefficients() const { return coeffs_; }

    double operator()(double x) const;

  private:
    ScalarFunction(Kind k, int degree, double snr, std::vector<double> c)
        : kind_(k), degree_(degree), snr_(snr), coeffs_(std::move(c)) {}

    Kind kind_;
    int degree_ = 0;
    double snr_ = 0.0;
    std::vector<double> coeffs_;
};

enum class Method { Determinant, SchurSum, ClosedForm2x2, PerturbedLimit };
std::string method_name(Method m);

struct Diagnostics {
    double min_rel_gap = 0.0;
    int quad_nodes = 0;          // largest node count any f_k needed
    double log_condition = 0.0;  // nats of cancellation in the k-sum:
                                 // max_k ln|det T_k| - ln|sum_k det T_k|
    double extrap_residual = 0.0;  // PerturbedLimit only
    bool degenerate_routed = false;
};

struct AverageResult {
    double value = 0.0;
    Method method = Method::Determinant;
    Diagnostics diagnostics;
};

struct EvalOptions {
    double quad_rel_tol = 1e-11;
    int quad_start_nodes = 64;
};

// f_k(x) = integral_0^inf e^{-t} (t x)^{n-(k+1)} f(t x) dt, the transformed
// row entries of the determinant formula. Monomials have the closed form
// (m+n-(k+1))! x^{m+n-(k+1)}; the other kinds integrate by generalized
// Gauss-Laguerre with the t^{n-(k+1)} factor folded into the weight.
double f_transform(const ScalarFunction& f, int n, int k, double x,
                   const EvalOptions& options = {});

// E[Tr f(H*AH)] for distinct eigenvalues: (1/det V) sum_k det T_k, where V
// is the Vandermonde matrix of the spectrum with row r holding exponent
// n-1-r and T_k replaces row k with {f_k(d_i)/(n-(k+1))!}. Throws
// DegenerateSpectrum when gaps fall under tolerance; callers wanting
// automatic routing use trace_average below.
AverageResult expected_trace_f(const Spectrum& s, const ScalarFunction& f,
                               const EvalOptions& options = {});

// E[Tr((H*AH)^m)] as the exact alternating hook-shape Schur sum
// sum_{k=0}^{min(n,m)-1} (-1)^k s_{(m-k,1^k)}(A) (m+n-(k+1))!/(n-(k+1))!.
AverageResult expected_trace_moment(const Spectrum& s, int m);

// Confluent-safe closed forms for n = 2.
double moment_2x2_closed(double d1, double d2, int m);
double capacity_2x2_closed(double d1, double d2);

// Corollary evaluations; snr is absorbed by scaling the spectrum. These
// route degenerate spectra through degenerate_regularize automatically.
AverageResult capacity(const Spectrum& s, double snr,
                       const EvalOptions& options = {});
AverageResult mmse(const Spectrum& s, double snr,
                   const EvalOptions& options = {});

// Confluent limit by perturbation: each cluster of coincident eigenvalues
// {d,...,d} becomes {d(1+j eps)}, evaluated at eps, eps/2, eps/4 and
// Richardson-extrapolated to eps = 0 (two stages, killing the eps and
// eps^2 error terms).
AverageResult degenerate_regularize(const Spectrum& s, const ScalarFunction& f,
                                    const EvalOptions& options = {});

// Routing wrappers: distinct spectra take the direct paths, degenerate
// ones go through degenerate_regularize with the routing flag set.
AverageResult trace_average(const Spectrum& s, const ScalarFunction& f,
                            const EvalOptions& options = {});
AverageResult trace_moment(const Spectrum& s, int m,
                           const EvalOptions& options = {});

}  // namespace gaussavg
