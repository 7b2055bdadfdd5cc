#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include "gaussavg/engine.hpp"
#include "gaussavg/partitions.hpp"

namespace gaussavg {

struct ComplexMatrix {
    int dim = 0;
    std::vector<std::complex<double>> entries;  // row-major dim x dim

    ComplexMatrix() = default;
    explicit ComplexMatrix(int n)
        : dim(n), entries(static_cast<std::size_t>(n) * n) {}

    std::complex<double>& at(int i, int j) {
        return entries[static_cast<std::size_t>(i) * dim + j];
    }
    const std::complex<double>& at(int i, int j) const {
        return entries[static_cast<std::size_t>(i) * dim + j];
    }
};

struct MCEstimate {
    double mean = 0.0;
    double std_error = 0.0;  // sample standard deviation / sqrt(samples)
    std::uint64_t samples = 0;
    std::uint64_t seed = 0;
};

// SplitMix64 mixing step; used to derive independent substream seeds.
std::uint64_t splitmix64(std::uint64_t x);

// Fixed, documented generator contract: an mt19937_64 seeded via splitmix64
// supplies 53-bit uniforms; standard normals come from the Marsaglia polar
// method (pairs, cached spare). The sampled sequence is part of the
// reproducibility contract and never changes within a release.
class RandomStream {
  public:
    explicit RandomStream(std::uint64_t seed) : gen_(seed) {}

    double uniform01();  // [0, 1), 53 random bits
    double normal();     // standard normal N(0, 1)

    // Complex standard Gaussian with E|z|^2 = 1: (g1 + i g2)/sqrt(2),
    // i.e. variance 1/2 per component. This is the normalization that
    // makes the matrix measure pi^{-n^2} exp(-Tr H*H) dH.
    std::complex<double> complex_normal();

  private:
    std::mt19937_64 gen_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

// n x n matrix of i.i.d. complex_normal entries, filled row-major.
ComplexMatrix sample_gaussian_matrix(int n, RandomStream& stream);

// Eigenvalues of a Hermitian matrix, ascending, by cyclic complex Jacobi
// rotations. Input must be Hermitian to tolerance 1e-12 (max asymmetry,
// relative to the largest entry); convergence is off-diagonal Frobenius
// norm below 1e-13 of the matrix norm within 30 sweeps.
std::vector<double> hermitian_eigenvalues(const ComplexMatrix& m);

// Monte Carlo estimate of E[Tr f(H*AH)] over the Gaussian measure, where
// A has spectrum a_eigs. Samples are processed in fixed-size chunks with
// per-chunk substreams seeded by splitmix64(splitmix64(seed) + chunk), and
// chunk statistics combine in chunk order, so the estimate is identical
// for any thread count. Monomial and polynomial kinds use power traces;
// other kinds diagonalize each sample.
MCEstimate mc_expected_trace_f(const Spectrum& a_eigs, const ScalarFunction& f,
                               std::uint64_t samples, std::uint64_t seed);

// Monte Carlo estimate of E[s_lambda(A H* B H)] (Schur polynomial applied
// to the sample spectrum), for the hook-product identity cross-check.
MCEstimate mc_schur_average(const Spectrum& a_eigs, const Spectrum& b_eigs,
                            const Partition& lambda, std::uint64_t samples,
                            std::uint64_t seed);

}  // namespace gaussavg
