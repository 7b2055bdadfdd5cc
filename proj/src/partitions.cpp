#include "gaussavg/partitions.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "gaussavg/errors.hpp"

namespace gaussavg {

Partition::Partition(std::vector<int> parts) : parts_(std::move(parts)) {
    for (std::size_t i = 0; i < parts_.size(); ++i) {
        if (parts_[i] < 0) throw DomainError("partition part " + std::to_string(i) + " is negative");
        if (i > 0 && parts_[i] > parts_[i - 1])
            throw DomainError("partition parts must be non-increasing (violated at index " +
                              std::to_string(i) + ")");
    }
    while (!parts_.empty() && parts_.back() == 0) parts_.pop_back();
    weight_ = std::accumulate(parts_.begin(), parts_.end(), 0);
}

Partition::Partition(std::initializer_list<int> parts) : Partition(std::vector<int>(parts)) {}

Partition Partition::hook_shape(int m, int k) {
    if (m < 1) throw DomainError("hook shape needs m >= 1");
    if (k < 0 || k > m - 1)
        throw DomainError("hook shape needs 0 <= k <= m-1, got k = " + std::to_string(k));
    std::vector<int> parts;
    parts.reserve(static_cast<std::size_t>(k) + 1);
    parts.push_back(m - k);
    for (int i = 0; i < k; ++i) parts.push_back(1);
    return Partition(std::move(parts));
}

int Partition::part(int i) const {
    if (i < 0 || i >= num_parts()) return 0;
    return parts_[static_cast<std::size_t>(i)];
}

Partition Partition::conjugate() const {
    if (parts_.empty()) return Partition{};
    std::vector<int> conj(static_cast<std::size_t>(parts_[0]), 0);
    for (int row : parts_)
        for (int j = 0; j < row; ++j) ++conj[static_cast<std::size_t>(j)];
    return Partition(std::move(conj));
}

HookGrid hook_lengths(const Partition& p) {
    HookGrid grid;
    const Partition conj = p.conjugate();
    grid.rows.reserve(static_cast<std::size_t>(p.num_parts()));
    for (int i = 0; i < p.num_parts(); ++i) {
        std::vector<int> row(static_cast<std::size_t>(p.part(i)));
        for (int j = 0; j < p.part(i); ++j) {
            const int arm = p.part(i) - j - 1;
            const int leg = conj.part(j) - i - 1;
            row[static_cast<std::size_t>(j)] = arm + leg + 1;
        }
        grid.rows.push_back(std::move(row));
    }
    return grid;
}

std::uint64_t hook_product_exact(const Partition& p) {
    if (p.weight() > 20)
        throw DomainError("exact hook product limited to weight <= 20, got " +
                          std::to_string(p.weight()));
    // h(lambda) divides weight! <= 20!, which fits in 64 bits.
    std::uint64_t prod = 1;
    for (const auto& row : hook_lengths(p).rows)
        for (int h : row) prod *= static_cast<std::uint64_t>(h);
    return prod;
}

SignedLogValue hook_product(const Partition& p) {
    if (p.weight() <= 20) {
        const long double v = static_cast<long double>(hook_product_exact(p));
        return SignedLogValue::from_log(+1, static_cast<double>(std::log(v)));
    }
    double log_sum = 0.0;
    for (const auto& row : hook_lengths(p).rows)
        for (int h : row) log_sum += std::log(static_cast<double>(h));
    return SignedLogValue::from_log(+1, log_sum);
}

std::uint64_t hook_product_hookshape_exact(int m, int k) {
    if (m < 1 || k < 0 || k > m - 1)
        throw DomainError("hook shape needs m >= 1 and 0 <= k <= m-1");
    if (m > 20) throw DomainError("exact hook-shape product limited to m <= 20");
    auto fact = [](int n) {
        std::uint64_t f = 1;
        for (int i = 2; i <= n; ++i) f *= static_cast<std::uint64_t>(i);
        return f;
    };
    return fact(k) * fact(m - k - 1) * static_cast<std::uint64_t>(m);
}

SignedLogValue hook_product_hookshape(int m, int k) {
    if (m < 1 || k < 0 || k > m - 1)
        throw DomainError("hook shape needs m >= 1 and 0 <= k <= m-1, got m = " +
                          std::to_string(m) + ", k = " + std::to_string(k));
    if (m <= 20) {
        const long double v = static_cast<long double>(hook_product_hookshape_exact(m, k));
        return SignedLogValue::from_log(+1, static_cast<double>(std::log(v)));
    }
    const double log_v = std::lgamma(k + 1.0) + std::lgamma(static_cast<double>(m - k)) +
                         std::log(static_cast<double>(m));
    return SignedLogValue::from_log(+1, log_v);
}

}  // namespace gaussavg
