#include "core/resample.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "core/errors.hpp"

namespace qsr {

namespace {

double keys_cubic(double x, double a) {
    x = std::fabs(x);
    if (x < 1.0) {
        return ((a + 2.0) * x - (a + 3.0)) * x * x + 1.0;
    }
    if (x < 2.0) {
        return (((x - 5.0) * x + 8.0) * x - 4.0) * a;
    }
    return 0.0;
}

double box_kernel(double x) {
    return (x >= -0.5 && x < 0.5) ? 1.0 : 0.0;
}

struct TapSet {
    // For each output coordinate: first source index and normalized weights.
    std::vector<int> start;
    std::vector<double> weights;
    int taps = 0;
};

// Precompute 1-D weights mapping in_size -> out_size with the center-aligned
// convention x_src = (x_dst + 0.5) * (in/out) - 0.5 and clamped indices.
TapSet make_taps(int in_size, int out_size, const ResampleKernel& kernel) {
    const double ratio = static_cast<double>(in_size) / out_size;
    // widen support when minifying
    const double scale = std::max(1.0, ratio);
    const double support = (kernel.kind == ResampleKernel::Kind::bicubic) ? 2.0 : 0.5;
    const int taps = std::max(1, static_cast<int>(std::ceil(2.0 * support * scale)) + 1);

    TapSet t;
    t.taps = taps;
    t.start.resize(out_size);
    t.weights.resize(static_cast<std::size_t>(out_size) * taps);
    for (int o = 0; o < out_size; ++o) {
        const double center = (o + 0.5) * ratio - 0.5;
        const int first = static_cast<int>(std::floor(center - support * scale + 0.5 - 1e-9));
        t.start[o] = first;
        double sum = 0.0;
        double* w = &t.weights[static_cast<std::size_t>(o) * taps];
        for (int k = 0; k < taps; ++k) {
            const double x = (center - (first + k)) / scale;
            const double v = (kernel.kind == ResampleKernel::Kind::bicubic)
                                 ? keys_cubic(x, kernel.a)
                                 : box_kernel(x);
            w[k] = v;
            sum += v;
        }
        if (sum != 0.0) {
            for (int k = 0; k < taps; ++k) {
                w[k] /= sum;
            }
        } else {
            // degenerate only for pathological kernels; fall back to nearest
            w[taps / 2] = 1.0;
        }
    }
    return t;
}

void resample_axis(const double* src, int in_w, int in_h, double* dst, int out_w,
                   const TapSet& t) {
    // horizontal pass over one plane: (in_h rows, in_w cols) -> (in_h, out_w)
    for (int r = 0; r < in_h; ++r) {
        const double* row = src + static_cast<std::size_t>(r) * in_w;
        double* out_row = dst + static_cast<std::size_t>(r) * out_w;
        for (int o = 0; o < out_w; ++o) {
            const double* w = &t.weights[static_cast<std::size_t>(o) * t.taps];
            const int first = t.start[o];
            double acc = 0.0;
            for (int k = 0; k < t.taps; ++k) {
                const int idx = std::clamp(first + k, 0, in_w - 1);
                acc += w[k] * row[idx];
            }
            out_row[o] = acc;
        }
    }
}

// transpose a plane (h rows, w cols) -> (w rows, h cols)
void transpose_plane(const double* src, int w, int h, double* dst) {
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            dst[static_cast<std::size_t>(c) * h + r] = src[static_cast<std::size_t>(r) * w + c];
        }
    }
}

} // namespace

Image resample(const Image& img, int out_w, int out_h, const ResampleKernel& kernel) {
    if (out_w < 1 || out_h < 1) {
        throw ArgumentError("resample: output dimensions must be >= 1");
    }
    const TapSet tx = make_taps(img.width, out_w, kernel);
    const TapSet ty = make_taps(img.height, out_h, kernel);

    Image out(out_w, out_h, img.channels);
    std::vector<double> tmp(static_cast<std::size_t>(out_w) * img.height);
    std::vector<double> tmp_t(static_cast<std::size_t>(out_w) * img.height);
    std::vector<double> tmp2(static_cast<std::size_t>(out_h) * out_w);
    for (int c = 0; c < img.channels; ++c) {
        resample_axis(img.plane(c), img.width, img.height, tmp.data(), out_w, tx);
        transpose_plane(tmp.data(), out_w, img.height, tmp_t.data());
        resample_axis(tmp_t.data(), img.height, out_w, tmp2.data(), out_h, ty);
        transpose_plane(tmp2.data(), out_h, out_w, out.plane(c));
    }
    return out;
}

Image downscale_by(const Image& img, int factor) {
    if (factor < 1) {
        throw ArgumentError("downscale factor must be >= 1");
    }
    const int w = std::max(1, img.width / factor);
    const int h = std::max(1, img.height / factor);
    return resample(img, w, h, ResampleKernel::bicubic());
}

} // namespace qsr
