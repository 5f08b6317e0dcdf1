// Coefficient-domain filtering of the N highest-frequency (lowest-eigenvalue)
// final-stage channels, and the composed defense: forward transform, filter,
// inverse transform.

#pragma once

#include <string>

#include "saak/kernels.hpp"
#include "saak/tensor.hpp"

namespace saak {

enum class FilterStrategy { Scale, Truncate, Clip };

struct FilterSpec {
    FilterStrategy strategy = FilterStrategy::Truncate;
    int count = 0;           // N channels, counted from the highest spectral index down
    double parameter = 0.0;  // Scale factor in [0,1] or Clip bound > 0; unused for Truncate
};

FilterStrategy parse_strategy(const std::string& name);  // "scale"|"truncate"|"clip"
std::string strategy_name(FilterStrategy s);

// Throws if the spec is invalid against a tensor with `channels` channels.
void validate_filter(const FilterSpec& spec, int channels);

// Channels with index >= channels - N transformed at every spatial location;
// all lower channels are bit-identical to the input.
CoefficientTensor apply_filter(CoefficientTensor c, const FilterSpec& spec);

// inverse(filter(forward(img))). With N = 0 or Scale factor 1 this is the
// identity up to FP round-off.
ImageTensor defend(const ImageTensor& img, const SaakModel& m, const FilterSpec& spec,
                   bool clamp = true);

}  // namespace saak
