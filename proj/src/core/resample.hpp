#pragma once

#include "core/image.hpp"

namespace qsr {

struct ResampleKernel {
    enum class Kind { bicubic, box };
    Kind kind = Kind::bicubic;
    // Keys convolution kernel sharpness; the usual convention.
    double a = -0.5;

    static ResampleKernel bicubic(double a = -0.5) { return {Kind::bicubic, a}; }
    static ResampleKernel box() { return {Kind::box, 0.0}; }
};

// Separable resampling with edge-clamped sampling. Kernel taps are
// renormalized to sum 1 so constant images map to constant images and
// same-size bicubic resampling is the identity. Downscaling widens the
// kernel support by the scale ratio (standard antialiased decimation).
Image resample(const Image& img, int out_w, int out_h, const ResampleKernel& kernel = {});

// Convenience: bicubic decimation to (floor(w/s), floor(h/s)).
Image downscale_by(const Image& img, int factor);

} // namespace qsr
