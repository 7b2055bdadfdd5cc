#pragma once

#include <cstdint>
#include <initializer_list>
#include <vector>

#include "gaussavg/signed_log.hpp"

namespace gaussavg {

// Integer partition: a non-increasing sequence of non-negative box counts.
// Trailing zeros are stripped at construction, so (2,2,0) == (2,2).
class Partition {
public:
    Partition() = default;
    explicit Partition(std::vector<int> parts);
    Partition(std::initializer_list<int> parts);

    // (m-k, 1^k): one row of m-k boxes atop a column of k single boxes.
    static Partition hook_shape(int m, int k);

    const std::vector<int>& parts() const { return parts_; }
    int num_parts() const { return static_cast<int>(parts_.size()); }
    // Row length, 0 beyond the last nonzero part.
    int part(int i) const;
    int weight() const { return weight_; }
    bool empty() const { return parts_.empty(); }

    Partition conjugate() const;

    bool operator==(const Partition& o) const { return parts_ == o.parts_; }

private:
    std::vector<int> parts_;
    int weight_ = 0;
};

// Hook lengths of every box, row by row; shape matches the Young diagram.
struct HookGrid {
    std::vector<std::vector<int>> rows;
};

// Hook length of each box: boxes to its right, plus boxes below it, plus one.
HookGrid hook_lengths(const Partition& p);

// Product of all hook lengths, h(lambda). Exact in 64-bit integers for
// weight <= 20; the signed-log form never overflows.
SignedLogValue hook_product(const Partition& p);
std::uint64_t hook_product_exact(const Partition& p);  // requires weight <= 20

// Closed form for the hook shape (m-k, 1^k):  k! (m-k-1)! m.
SignedLogValue hook_product_hookshape(int m, int k);
std::uint64_t hook_product_hookshape_exact(int m, int k);  // requires m <= 20

}  // namespace gaussavg
