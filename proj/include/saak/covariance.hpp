// Streaming second-moment accumulation for kernel training. Partial
// accumulators over disjoint row sets merge by summation, so covariance
// estimation can be split and recombined exactly (up to FP rounding).

#pragma once

#include <cstdint>
#include <vector>

#include "saak/tensor.hpp"

namespace saak {

class CovarianceAccumulator {
public:
    explicit CovarianceAccumulator(int dim);

    int dim() const { return dim_; }
    std::uint64_t count() const { return count_; }

    // Adds every row of the batch. Rows are expected to be mean-removed
    // cuboids when used for kernel training; the accumulator itself is
    // agnostic and just tracks sums.
    void accumulate(const CuboidBatch& batch);
    void merge(const CovarianceAccumulator& other);

    const std::vector<double>& sum() const { return sum_; }
    std::vector<double> mean() const;

    // outer_sum/count - mean*mean', full symmetric dim x dim matrix.
    std::vector<double> covariance() const;
    std::vector<double> outer_sum() const;

private:
    int dim_;
    std::uint64_t count_ = 0;
    std::vector<double> sum_;
    std::vector<double> outer_;  // upper triangle maintained, mirrored on read
};

}  // namespace saak
