#include "saak/filtering.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "saak/transform.hpp"

namespace saak {

FilterStrategy parse_strategy(const std::string& name) {
    if (name == "scale") return FilterStrategy::Scale;
    if (name == "truncate") return FilterStrategy::Truncate;
    if (name == "clip") return FilterStrategy::Clip;
    throw std::invalid_argument("unknown filter strategy '" + name +
                                "' (expected scale, truncate or clip)");
}

std::string strategy_name(FilterStrategy s) {
    switch (s) {
        case FilterStrategy::Scale: return "scale";
        case FilterStrategy::Truncate: return "truncate";
        case FilterStrategy::Clip: return "clip";
    }
    return "?";
}

void validate_filter(const FilterSpec& spec, int channels) {
    if (spec.count < 0 || spec.count > channels)
        throw std::invalid_argument("filter count " + std::to_string(spec.count) +
                                    " out of range for " + std::to_string(channels) +
                                    " channels");
    if (!std::isfinite(spec.parameter))
        throw std::invalid_argument("filter parameter must be finite");
    if (spec.strategy == FilterStrategy::Scale &&
        (spec.parameter < 0.0 || spec.parameter > 1.0))
        throw std::invalid_argument("scale factor must lie in [0,1]");
    if (spec.strategy == FilterStrategy::Clip && !(spec.parameter > 0.0))
        throw std::invalid_argument("clip bound must be positive");
}

CoefficientTensor apply_filter(CoefficientTensor c, const FilterSpec& spec) {
    validate_filter(spec, c.channels);
    if (spec.count == 0) return c;
    const int first = c.channels - spec.count;
    const std::int64_t positions = static_cast<std::int64_t>(c.height) * c.width;
    for (std::int64_t p = 0; p < positions; ++p) {
        double* ch = c.data.data() + static_cast<std::size_t>(p) * c.channels;
        switch (spec.strategy) {
            case FilterStrategy::Scale:
                for (int i = first; i < c.channels; ++i) ch[i] *= spec.parameter;
                break;
            case FilterStrategy::Truncate:
                for (int i = first; i < c.channels; ++i) ch[i] = 0.0;
                break;
            case FilterStrategy::Clip:
                for (int i = first; i < c.channels; ++i)
                    ch[i] = std::min(spec.parameter, std::max(-spec.parameter, ch[i]));
                break;
        }
    }
    return c;
}

ImageTensor defend(const ImageTensor& img, const SaakModel& m, const FilterSpec& spec,
                   bool clamp) {
    auto coeffs = forward(img, m);
    coeffs = apply_filter(std::move(coeffs), spec);
    return inverse(coeffs, m, clamp);
}

}  // namespace saak
