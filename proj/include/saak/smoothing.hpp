// Spatial smoothing filters cascaded after the coefficient-domain defense.
// k = 2 windows anchor top-left; k = 3 windows are centered. Out-of-range
// taps mirror about the edge pixel.

#pragma once

#include "saak/tensor.hpp"

namespace saak {

ImageTensor median_smooth(const ImageTensor& img, int k);
ImageTensor mean_smooth(const ImageTensor& img, int k);

}  // namespace saak
