#include "saak/analysis.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace saak {
namespace {

constexpr double kDegenerateRange = 1e-12;

void check_population(const std::vector<CoefficientTensor>& coeffs) {
    if (coeffs.empty()) throw std::invalid_argument("analysis: empty population");
    const auto& first = coeffs[0];
    for (const auto& c : coeffs)
        if (c.height != first.height || c.width != first.width ||
            c.channels != first.channels)
            throw std::invalid_argument("analysis: population geometry mismatch");
}

void check_paired(const std::vector<CoefficientTensor>& clean,
                  const std::vector<CoefficientTensor>& adv) {
    check_population(clean);
    check_population(adv);
    if (clean.size() != adv.size())
        throw std::invalid_argument("analysis: unpaired populations (" +
                                    std::to_string(clean.size()) + " vs " +
                                    std::to_string(adv.size()) + ")");
    if (clean[0].channels != adv[0].channels || clean[0].height != adv[0].height ||
        clean[0].width != adv[0].width)
        throw std::invalid_argument("analysis: paired populations differ in geometry");
}

}  // namespace

std::vector<ChannelStats> channel_stats(const std::vector<CoefficientTensor>& coeffs) {
    check_population(coeffs);
    const int K = coeffs[0].channels;
    std::vector<ChannelStats> stats(K);
    for (int k = 0; k < K; ++k) {
        stats[k].channel = k;
        stats[k].min = std::numeric_limits<double>::infinity();
        stats[k].max = -std::numeric_limits<double>::infinity();
    }
    // two-pass moments: mean first, then centered second moment
    std::vector<double> sum(K, 0.0);
    std::uint64_t per_channel = 0;
    for (const auto& t : coeffs) {
        const std::int64_t positions = static_cast<std::int64_t>(t.height) * t.width;
        per_channel += static_cast<std::uint64_t>(positions);
        for (std::int64_t p = 0; p < positions; ++p) {
            const double* ch = t.data.data() + static_cast<std::size_t>(p) * K;
            for (int k = 0; k < K; ++k) {
                const double v = ch[k];
                sum[k] += v;
                if (v < stats[k].min) stats[k].min = v;
                if (v > stats[k].max) stats[k].max = v;
            }
        }
    }
    std::vector<double> mean(K);
    for (int k = 0; k < K; ++k) mean[k] = sum[k] / static_cast<double>(per_channel);
    std::vector<double> m2(K, 0.0);
    for (const auto& t : coeffs) {
        const std::int64_t positions = static_cast<std::int64_t>(t.height) * t.width;
        for (std::int64_t p = 0; p < positions; ++p) {
            const double* ch = t.data.data() + static_cast<std::size_t>(p) * K;
            for (int k = 0; k < K; ++k) {
                const double d = ch[k] - mean[k];
                m2[k] += d * d;
            }
        }
    }
    for (int k = 0; k < K; ++k) {
        stats[k].mean = mean[k];
        stats[k].variance = m2[k] / static_cast<double>(per_channel);
    }
    return stats;
}

std::vector<double> channel_rmse(const std::vector<CoefficientTensor>& clean,
                                 const std::vector<CoefficientTensor>& adv) {
    check_paired(clean, adv);
    const int K = clean[0].channels;
    std::vector<double> sq(K, 0.0);
    std::uint64_t per_channel = 0;
    for (std::size_t i = 0; i < clean.size(); ++i) {
        const auto& a = clean[i];
        const auto& b = adv[i];
        const std::int64_t positions = static_cast<std::int64_t>(a.height) * a.width;
        per_channel += static_cast<std::uint64_t>(positions);
        for (std::int64_t p = 0; p < positions; ++p) {
            const double* ca = a.data.data() + static_cast<std::size_t>(p) * K;
            const double* cb = b.data.data() + static_cast<std::size_t>(p) * K;
            for (int k = 0; k < K; ++k) {
                const double d = cb[k] - ca[k];
                sq[k] += d * d;
            }
        }
    }
    for (double& v : sq) v = std::sqrt(v / static_cast<double>(per_channel));
    return sq;
}

NormalizedRmse normalized_channel_rmse(const std::vector<CoefficientTensor>& clean,
                                       const std::vector<CoefficientTensor>& adv) {
    const auto rmse = channel_rmse(clean, adv);
    const auto stats = channel_stats(clean);
    NormalizedRmse out;
    out.values.resize(rmse.size());
    out.degenerate.resize(rmse.size());
    for (std::size_t k = 0; k < rmse.size(); ++k) {
        const double range = stats[k].max - stats[k].min;
        if (range < kDegenerateRange) {
            out.values[k] = 0.0;
            out.degenerate[k] = true;
        } else {
            out.values[k] = rmse[k] / range;
            out.degenerate[k] = false;
        }
    }
    return out;
}

Histogram channel_histogram(const std::vector<CoefficientTensor>& coeffs, int channel,
                            int bins, double lo, double hi) {
    check_population(coeffs);
    if (channel < 0 || channel >= coeffs[0].channels)
        throw std::invalid_argument("histogram: channel out of range");
    if (bins < 1) throw std::invalid_argument("histogram: need at least one bin");
    if (!(hi > lo)) throw std::invalid_argument("histogram: need hi > lo");
    Histogram h;
    h.edges.resize(bins + 1);
    for (int b = 0; b <= bins; ++b) h.edges[b] = lo + (hi - lo) * b / bins;
    h.counts.assign(bins, 0);
    const int K = coeffs[0].channels;
    for (const auto& t : coeffs) {
        const std::int64_t positions = static_cast<std::int64_t>(t.height) * t.width;
        for (std::int64_t p = 0; p < positions; ++p) {
            const double v = t.data[static_cast<std::size_t>(p) * K + channel];
            int b = static_cast<int>(std::floor((v - lo) / (hi - lo) * bins));
            b = std::min(bins - 1, std::max(0, b));  // clamp outliers into end bins
            ++h.counts[b];
        }
    }
    return h;
}

DiscriminabilitySummary discriminability_report(const std::vector<CoefficientTensor>& clean,
                                                const std::vector<CoefficientTensor>& adv,
                                                std::ostream& out) {
    const auto cstats = channel_stats(clean);
    const auto astats = channel_stats(adv);
    const auto rmse = channel_rmse(clean, adv);
    const auto nrmse = normalized_channel_rmse(clean, adv);
    const int K = static_cast<int>(cstats.size());

    out << "channel,clean_min,clean_max,clean_var,adv_min,adv_max,adv_var,rmse,"
           "normalized_rmse,degenerate_range\n";
    out.precision(12);
    for (int k = 0; k < K; ++k) {
        out << k << ',' << cstats[k].min << ',' << cstats[k].max << ',' << cstats[k].variance
            << ',' << astats[k].min << ',' << astats[k].max << ',' << astats[k].variance
            << ',' << rmse[k] << ',' << nrmse.values[k] << ','
            << (nrmse.degenerate[k] ? 1 : 0) << '\n';
    }

    const int quarter = K / 4;
    DiscriminabilitySummary s;
    if (quarter > 0) {
        double top = 0.0, bottom = 0.0;
        for (int k = 0; k < quarter; ++k) bottom += nrmse.values[k];
        for (int k = K - quarter; k < K; ++k) top += nrmse.values[k];
        s.top_quartile_mean_normalized_rmse = top / quarter;
        s.bottom_quartile_mean_normalized_rmse = bottom / quarter;
    }
    out << "top_quartile_mean_normalized_rmse,,,,,,,," << s.top_quartile_mean_normalized_rmse
        << ",\n";
    out << "bottom_quartile_mean_normalized_rmse,,,,,,,,"
        << s.bottom_quartile_mean_normalized_rmse << ",\n";
    return s;
}

DiscriminabilitySummary discriminability_report(const std::vector<CoefficientTensor>& clean,
                                                const std::vector<CoefficientTensor>& adv,
                                                const std::filesystem::path& out_path) {
    std::ostringstream buf;
    auto summary = discriminability_report(clean, adv, buf);
    std::ofstream f(out_path, std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open " + out_path.string() + " for writing");
    f << buf.str();
    if (!f) throw std::runtime_error("failed writing " + out_path.string());
    return summary;
}

}  // namespace saak
