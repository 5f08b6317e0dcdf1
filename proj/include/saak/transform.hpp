// Forward and inverse multi-stage transforms between images and their joint
// spatial-spectral representation. Per cuboid c of length d the forward map
// emits DC = (1/sqrt(d)) * sum(c) followed by the AC projections of the
// mean-removed residual; [DC; AC] preserves the squared norm exactly, so the
// whole transform is an isometry and the inverse is exact.

#pragma once

#include "saak/kernels.hpp"
#include "saak/tensor.hpp"

namespace saak {

// K_T with K_0 = C and K_i = s^2 * K_{i-1} + 1.
int spectral_dim(int s, int stages, int in_channels);

CoefficientTensor forward_stage(const ImageTensor& t, const StageKernels& k);
CoefficientTensor forward_stage(const CoefficientTensor& t, const StageKernels& k);

// Inverts one stage; the result has stage = c.stage - 1, where stage 0 means
// pixel domain.
CoefficientTensor inverse_stage(const CoefficientTensor& c, const StageKernels& k);

CoefficientTensor forward(const ImageTensor& img, const SaakModel& m);

// Full inversion back to the pixel domain; clamps into [0,1] at the end only
// when requested.
ImageTensor inverse(const CoefficientTensor& coeffs, const SaakModel& m,
                    bool clamp = false);

}  // namespace saak
