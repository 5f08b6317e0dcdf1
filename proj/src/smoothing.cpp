#include "saak/smoothing.hpp"

#include <algorithm>
#include <stdexcept>

namespace saak {
namespace {

// mirror about the edge pixel (…,2,1,0 | 1,2,…); degenerate axes clamp to 0
int mirror(int i, int n) {
    if (n == 1) return 0;
    while (i < 0 || i >= n) {
        if (i < 0) i = -i;
        if (i >= n) i = 2 * n - 2 - i;
    }
    return i;
}

template <typename Reduce>
ImageTensor smooth(const ImageTensor& img, int k, Reduce reduce) {
    if (k != 2 && k != 3) throw std::invalid_argument("smoothing: kernel must be 2 or 3");
    const int offset = k == 2 ? 0 : -1;  // top-left anchor for k=2, centered for k=3
    auto out = ImageTensor::zeros(img.height, img.width, img.channels);
    double window[9];
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x)
            for (int c = 0; c < img.channels; ++c) {
                int n = 0;
                for (int dy = 0; dy < k; ++dy)
                    for (int dx = 0; dx < k; ++dx)
                        window[n++] = img.at(mirror(y + offset + dy, img.height),
                                             mirror(x + offset + dx, img.width), c);
                out.at(y, x, c) = reduce(window, n);
            }
    return out;
}

}  // namespace

ImageTensor median_smooth(const ImageTensor& img, int k) {
    return smooth(img, k, [](double* w, int n) {
        std::sort(w, w + n);
        // even windows: mean of the two middle order statistics
        return n % 2 == 1 ? w[n / 2] : 0.5 * (w[n / 2 - 1] + w[n / 2]);
    });
}

ImageTensor mean_smooth(const ImageTensor& img, int k) {
    return smooth(img, k, [](double* w, int n) {
        double s = 0.0;
        for (int i = 0; i < n; ++i) s += w[i];
        return s / n;
    });
}

}  // namespace saak
