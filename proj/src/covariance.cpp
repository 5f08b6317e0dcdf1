#include "saak/covariance.hpp"

#include <stdexcept>
#include <string>

namespace saak {

CovarianceAccumulator::CovarianceAccumulator(int dim) : dim_(dim) {
    if (dim < 1) throw std::invalid_argument("covariance: dim must be >= 1");
    sum_.assign(dim, 0.0);
    outer_.assign(static_cast<std::size_t>(dim) * dim, 0.0);
}

void CovarianceAccumulator::accumulate(const CuboidBatch& batch) {
    if (batch.dim != dim_)
        throw std::invalid_argument("covariance: batch dim " + std::to_string(batch.dim) +
                                    " does not match accumulator dim " +
                                    std::to_string(dim_));
    for (std::int64_t r = 0; r < batch.count; ++r) {
        const double* row = batch.data.data() + static_cast<std::size_t>(r) * dim_;
        for (int i = 0; i < dim_; ++i) {
            const double ri = row[i];
            sum_[i] += ri;
            double* oi = outer_.data() + static_cast<std::size_t>(i) * dim_;
            for (int j = i; j < dim_; ++j) oi[j] += ri * row[j];
        }
    }
    count_ += static_cast<std::uint64_t>(batch.count);
}

void CovarianceAccumulator::merge(const CovarianceAccumulator& other) {
    if (other.dim_ != dim_)
        throw std::invalid_argument("covariance: cannot merge accumulators of dims " +
                                    std::to_string(dim_) + " and " +
                                    std::to_string(other.dim_));
    for (int i = 0; i < dim_; ++i) sum_[i] += other.sum_[i];
    for (std::size_t k = 0; k < outer_.size(); ++k) outer_[k] += other.outer_[k];
    count_ += other.count_;
}

std::vector<double> CovarianceAccumulator::mean() const {
    if (count_ == 0) throw std::runtime_error("covariance: no rows accumulated");
    std::vector<double> m(sum_);
    for (double& v : m) v /= static_cast<double>(count_);
    return m;
}

std::vector<double> CovarianceAccumulator::covariance() const {
    const auto m = mean();
    std::vector<double> c(static_cast<std::size_t>(dim_) * dim_);
    const double inv_n = 1.0 / static_cast<double>(count_);
    for (int i = 0; i < dim_; ++i)
        for (int j = i; j < dim_; ++j) {
            const double v = outer_[static_cast<std::size_t>(i) * dim_ + j] * inv_n -
                             m[i] * m[j];
            c[static_cast<std::size_t>(i) * dim_ + j] = v;
            c[static_cast<std::size_t>(j) * dim_ + i] = v;
        }
    return c;
}

std::vector<double> CovarianceAccumulator::outer_sum() const {
    std::vector<double> o(static_cast<std::size_t>(dim_) * dim_);
    for (int i = 0; i < dim_; ++i)
        for (int j = i; j < dim_; ++j) {
            const double v = outer_[static_cast<std::size_t>(i) * dim_ + j];
            o[static_cast<std::size_t>(i) * dim_ + j] = v;
            o[static_cast<std::size_t>(j) * dim_ + i] = v;
        }
    return o;
}

}  // namespace saak
