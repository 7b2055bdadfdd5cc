#include "gaussavg/mc_oracle.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <thread>

#include "gaussavg/errors.hpp"
#include "gaussavg/schur.hpp"

namespace gaussavg {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

double RandomStream::uniform01() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
}

double RandomStream::normal() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    double u, v, s;
    do {
        u = 2.0 * uniform01() - 1.0;
        v = 2.0 * uniform01() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double factor = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * factor;
    have_spare_ = true;
    return u * factor;
}

std::complex<double> RandomStream::complex_normal() {
    constexpr double kInvSqrt2 = 0.70710678118654752440;
    const double re = normal();
    const double im = normal();
    return {re * kInvSqrt2, im * kInvSqrt2};
}

ComplexMatrix sample_gaussian_matrix(int n, RandomStream& stream) {
    if (n < 1)
        throw DomainError("sample_gaussian_matrix: n must be >= 1, got " +
                          std::to_string(n));
    ComplexMatrix h(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) h.at(i, j) = stream.complex_normal();
    return h;
}

std::vector<double> hermitian_eigenvalues(const ComplexMatrix& m) {
    const int n = m.dim;
    if (n < 1) throw DomainError("hermitian_eigenvalues: empty matrix");
    if (static_cast<std::size_t>(n) * n != m.entries.size())
        throw DomainError("hermitian_eigenvalues: entry count does not match dim");

    double max_abs = 0.0;
    double max_asym = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            max_abs = std::max(max_abs, std::abs(m.at(i, j)));
            max_asym = std::max(max_asym,
                                std::abs(m.at(i, j) - std::conj(m.at(j, i))));
        }
    if (max_asym > 1e-12 * std::max(1.0, max_abs))
        throw NotHermitian("matrix asymmetry " + std::to_string(max_asym) +
                           " exceeds tolerance");

    ComplexMatrix a = m;
    double fro = 0.0;
    for (const auto& z : a.entries) fro += std::norm(z);
    fro = std::sqrt(fro);
    const double off_tol = 1e-13 * fro;

    bool converged = false;
    for (int sweep = 0; sweep < 30 && !converged; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off += 2.0 * std::norm(a.at(p, q));
        if (std::sqrt(off) <= off_tol) {
            converged = true;
            break;
        }
        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const std::complex<double> b = a.at(p, q);
                const double ab = std::abs(b);
                if (ab <= off_tol / (10.0 * n * n) + 1e-300) continue;
                const std::complex<double> w = b / ab;  // e^{i phase}
                const double app = a.at(p, p).real();
                const double aqq = a.at(q, q).real();
                // Zeroing the (p,q) entry of U^H A U with the phase-folded
                // rotation u_pp = u_qq = c, u_pq = -s w, u_qp = s conj(w)
                // requires t = tan(theta) with t^2 - 2 tau t - 1 = 0.
                const double tau = (aqq - app) / (2.0 * ab);
                // Smaller-magnitude root, via t1 t2 = -1 to avoid cancellation.
                const double t =
                    tau >= 0.0 ? -1.0 / (tau + std::sqrt(1.0 + tau * tau))
                               : 1.0 / (-tau + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                for (int i = 0; i < n; ++i) {
                    if (i == p || i == q) continue;
                    const std::complex<double> aip = a.at(i, p);
                    const std::complex<double> aiq = a.at(i, q);
                    a.at(i, p) = c * aip + s * std::conj(w) * aiq;
                    a.at(i, q) = -s * w * aip + c * aiq;
                    a.at(p, i) = std::conj(a.at(i, p));
                    a.at(q, i) = std::conj(a.at(i, q));
                }
                a.at(p, p) = app + t * ab;
                a.at(q, q) = aqq - t * ab;
                a.at(p, q) = 0.0;
                a.at(q, p) = 0.0;
            }
        }
    }
    if (!converged) {
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off += 2.0 * std::norm(a.at(p, q));
        if (std::sqrt(off) > off_tol)
            throw NoConvergence(
                "Jacobi eigensolver did not converge in 30 sweeps");
    }

    std::vector<double> eigs(n);
    for (int i = 0; i < n; ++i) eigs[i] = a.at(i, i).real();
    std::sort(eigs.begin(), eigs.end());
    return eigs;
}

namespace {

constexpr std::uint64_t kChunkSize = 4096;

struct ChunkStats {
    std::uint64_t count = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void push(double x) {
        ++count;
        const double delta = x - mean;
        mean += delta / static_cast<double>(count);
        m2 += delta * (x - mean);
    }
};

ChunkStats combine(const ChunkStats& a, const ChunkStats& b) {
    if (a.count == 0) return b;
    if (b.count == 0) return a;
    ChunkStats out;
    out.count = a.count + b.count;
    const double delta = b.mean - a.mean;
    const double na = static_cast<double>(a.count);
    const double nb = static_cast<double>(b.count);
    const double nab = static_cast<double>(out.count);
    out.mean = a.mean + delta * nb / nab;
    out.m2 = a.m2 + b.m2 + delta * delta * na * nb / nab;
    return out;
}

// Chunked, deterministic parallel driver: chunk statistics are stored by
// index and combined in index order afterwards, so the result does not
// depend on the number of worker threads.
MCEstimate run_chunked(std::uint64_t samples, std::uint64_t seed,
                        const std::function<double(RandomStream&)>& one_sample) {
    if (samples < 100)
        throw DomainError("Monte Carlo runs need samples >= 100, got " +
                          std::to_string(samples));
    const std::uint64_t num_chunks = (samples + kChunkSize - 1) / kChunkSize;
    std::vector<ChunkStats> stats(num_chunks);
    const std::uint64_t stream_base = splitmix64(seed);

    std::atomic<std::uint64_t> next_chunk{0};
    const auto worker = [&]() {
        for (;;) {
            const std::uint64_t ci = next_chunk.fetch_add(1);
            if (ci >= num_chunks) return;
            RandomStream rs(splitmix64(stream_base + ci));
            const std::uint64_t begin = ci * kChunkSize;
            const std::uint64_t count = std::min(kChunkSize, samples - begin);
            ChunkStats local;
            for (std::uint64_t i = 0; i < count; ++i) local.push(one_sample(rs));
            stats[ci] = local;
        }
    };

    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const unsigned n_threads = static_cast<unsigned>(
        std::min<std::uint64_t>(hw, num_chunks));
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    ChunkStats total;
    for (const ChunkStats& s : stats) total = combine(total, s);
    const double variance =
        total.m2 / static_cast<double>(total.count - 1);
    MCEstimate est;
    est.mean = total.mean;
    est.std_error = std::sqrt(variance / static_cast<double>(total.count));
    est.samples = samples;
    est.seed = seed;
    return est;
}

// M = G^H G, the Hermitian Gram matrix of G.
ComplexMatrix gram(const ComplexMatrix& g) {
    const int n = g.dim;
    ComplexMatrix m(n);
    for (int j = 0; j < n; ++j)
        for (int k = j; k < n; ++k) {
            std::complex<double> acc = 0.0;
            for (int i = 0; i < n; ++i) acc += std::conj(g.at(i, j)) * g.at(i, k);
            m.at(j, k) = acc;
            m.at(k, j) = std::conj(acc);
        }
    return m;
}

// Fills traces[p] = Tr(M^p) for p = 1..max_power.
void trace_powers(const ComplexMatrix& m, int max_power,
                  std::vector<double>& traces) {
    const int n = m.dim;
    ComplexMatrix b = m;
    for (int p = 1; p <= max_power; ++p) {
        double tr = 0.0;
        for (int i = 0; i < n; ++i) tr += b.at(i, i).real();
        traces[p] = tr;
        if (p == max_power) break;
        ComplexMatrix next(n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                std::complex<double> acc = 0.0;
                for (int k = 0; k < n; ++k) acc += b.at(i, k) * m.at(k, j);
                next.at(i, j) = acc;
            }
        b = next;
    }
}

}  // namespace

MCEstimate mc_expected_trace_f(const Spectrum& a_eigs, const ScalarFunction& f,
                               std::uint64_t samples, std::uint64_t seed) {
    const int n = a_eigs.n();
    std::vector<double> sqrt_a(n);
    for (int i = 0; i < n; ++i) sqrt_a[i] = std::sqrt(a_eigs.eigenvalues()[i]);

    const bool power_path = f.kind() == ScalarFunction::Kind::Monomial ||
                            f.kind() == ScalarFunction::Kind::Polynomial;
    int max_power = 0;
    std::vector<double> coeffs;
    if (power_path) {
        if (f.kind() == ScalarFunction::Kind::Monomial) {
            max_power = f.degree();
            coeffs.assign(static_cast<std::size_t>(max_power) + 1, 0.0);
            coeffs.back() = 1.0;
        } else {
            coeffs = f.coefficients();
            max_power = coeffs.empty() ? 0 : static_cast<int>(coeffs.size()) - 1;
        }
    }

    const auto one_sample = [&, n](RandomStream& rs) {
        ComplexMatrix h = sample_gaussian_matrix(n, rs);
        // H* A H = G^H G with G = diag(sqrt(a)) H.
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) h.at(i, j) *= sqrt_a[i];
        const ComplexMatrix m = gram(h);
        if (power_path) {
            std::vector<double> traces(static_cast<std::size_t>(max_power) + 1,
                                       0.0);
            traces[0] = n;
            if (max_power >= 1) trace_powers(m, max_power, traces);
            double acc = 0.0;
            for (int p = 0; p <= max_power; ++p)
                if (p < static_cast<int>(coeffs.size()) && coeffs[p] != 0.0)
                    acc += coeffs[p] * traces[p];
            return acc;
        }
        double acc = 0.0;
        for (double lambda : hermitian_eigenvalues(m)) acc += f(lambda);
        return acc;
    };

    return run_chunked(samples, seed, one_sample);
}

MCEstimate mc_schur_average(const Spectrum& a_eigs, const Spectrum& b_eigs,
                            const Partition& lambda, std::uint64_t samples,
                            std::uint64_t seed) {
    const int n = a_eigs.n();
    if (b_eigs.n() != n)
        throw DomainError("mc_schur_average: spectra must share a dimension");
    std::vector<double> sqrt_a(n), sqrt_b(n);
    for (int i = 0; i < n; ++i) {
        sqrt_a[i] = std::sqrt(a_eigs.eigenvalues()[i]);
        sqrt_b[i] = std::sqrt(b_eigs.eigenvalues()[i]);
    }

    const auto one_sample = [&, n](RandomStream& rs) {
        ComplexMatrix g = sample_gaussian_matrix(n, rs);
        // A H^H B H is isospectral to G^H G with G = B^{1/2} H A^{1/2}.
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) g.at(i, j) *= sqrt_b[i] * sqrt_a[j];
        const std::vector<double> eigs = hermitian_eigenvalues(gram(g));
        return schur_ssyt_oracle(lambda, PointSet(eigs));
    };

    return run_chunked(samples, seed, one_sample);
}

}  // namespace gaussavg
