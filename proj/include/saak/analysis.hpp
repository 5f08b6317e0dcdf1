// Per-channel diagnostics over coefficient populations: distribution
// statistics, histograms, and (normalized) RMSE between paired clean and
// adversarial populations. Statistics pool all spatial locations of all
// images per spectral channel.

#pragma once

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <vector>

#include "saak/tensor.hpp"

namespace saak {

struct ChannelStats {
    int channel = 0;
    double min = 0.0;
    double max = 0.0;
    double mean = 0.0;
    double variance = 0.0;  // population variance
};

struct Histogram {
    std::vector<double> edges;          // B+1 ascending
    std::vector<std::uint64_t> counts;  // B bins, conserve the population size
};

struct NormalizedRmse {
    std::vector<double> values;
    std::vector<bool> degenerate;  // channels whose clean range is < 1e-12
};

std::vector<ChannelStats> channel_stats(const std::vector<CoefficientTensor>& coeffs);

// Paired populations: adv[i] derived from clean[i], identical geometry.
std::vector<double> channel_rmse(const std::vector<CoefficientTensor>& clean,
                                 const std::vector<CoefficientTensor>& adv);

// channel_rmse divided by the clean population's per-channel range; channels
// with range < 1e-12 report 0 and are flagged.
NormalizedRmse normalized_channel_rmse(const std::vector<CoefficientTensor>& clean,
                                       const std::vector<CoefficientTensor>& adv);

// Uniform bins over [lo, hi]; values outside are clamped into the end bins.
Histogram channel_histogram(const std::vector<CoefficientTensor>& coeffs, int channel,
                            int bins, double lo, double hi);

struct DiscriminabilitySummary {
    double top_quartile_mean_normalized_rmse = 0.0;
    double bottom_quartile_mean_normalized_rmse = 0.0;
};

// CSV: one row per channel (stats for both populations, rmse, normalized
// rmse), then quartile summary rows. Returns the summary.
DiscriminabilitySummary discriminability_report(const std::vector<CoefficientTensor>& clean,
                                                const std::vector<CoefficientTensor>& adv,
                                                std::ostream& out);
DiscriminabilitySummary discriminability_report(const std::vector<CoefficientTensor>& clean,
                                                const std::vector<CoefficientTensor>& adv,
                                                const std::filesystem::path& out_path);

}  // namespace saak
