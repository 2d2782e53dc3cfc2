#include "core/image.hpp"

#include <cmath>
#include <limits>

#include "core/errors.hpp"

namespace qsr {

Image::Image(int w, int h, int c, double fill)
    : width(w), height(h), channels(c),
      data(static_cast<std::size_t>(w) * h * c, fill) {
    // feature maps use 4 planes internally; files carry 1 or 3
    if (w < 1 || h < 1 || (c != 1 && c != 3 && c != 4)) {
        throw ArgumentError("invalid image shape");
    }
}

std::uint8_t encode_u8(double v) {
    if (v < 0.0) v = 0.0;
    if (v > 1.0) v = 1.0;
    const double scaled = v * 255.0;
    // round half away from zero; scaled >= 0 here
    return static_cast<std::uint8_t>(std::floor(scaled + 0.5));
}

namespace {

// BT.601 full-range: Y = 0.299 R + 0.587 G + 0.114 B, chroma offsets at 0.5.
// The inverse recovers G from (Y, R, B) so the round trip is exact.
constexpr double kWr = 0.299;
constexpr double kWg = 0.587;
constexpr double kWb = 0.114;
constexpr double kCbScale = 1.772; // 2 * (1 - kWb)
constexpr double kCrScale = 1.402; // 2 * (1 - kWr)

} // namespace

Image rgb_to_ycbcr(const Image& img) {
    if (img.channels != 3) {
        throw DimensionError("rgb_to_ycbcr expects a 3-channel image");
    }
    Image out(img.width, img.height, 3);
    const double* r = img.plane(0);
    const double* g = img.plane(1);
    const double* b = img.plane(2);
    double* y = out.plane(0);
    double* cb = out.plane(1);
    double* cr = out.plane(2);
    const std::size_t n = img.pixels_per_plane();
    for (std::size_t i = 0; i < n; ++i) {
        const double luma = kWr * r[i] + kWg * g[i] + kWb * b[i];
        y[i] = luma;
        cb[i] = 0.5 + (b[i] - luma) / kCbScale;
        cr[i] = 0.5 + (r[i] - luma) / kCrScale;
    }
    return out;
}

Image ycbcr_to_rgb(const Image& img) {
    if (img.channels != 3) {
        throw DimensionError("ycbcr_to_rgb expects a 3-channel image");
    }
    Image out(img.width, img.height, 3);
    const double* y = img.plane(0);
    const double* cb = img.plane(1);
    const double* cr = img.plane(2);
    double* r = out.plane(0);
    double* g = out.plane(1);
    double* b = out.plane(2);
    const std::size_t n = img.pixels_per_plane();
    for (std::size_t i = 0; i < n; ++i) {
        const double rr = y[i] + kCrScale * (cr[i] - 0.5);
        const double bb = y[i] + kCbScale * (cb[i] - 0.5);
        r[i] = rr;
        b[i] = bb;
        g[i] = (y[i] - kWr * rr - kWb * bb) / kWg;
    }
    return out;
}

Image luma(const Image& img) {
    if (img.channels == 1) {
        return img;
    }
    if (img.channels != 3) {
        throw DimensionError("luma expects a 1- or 3-channel image");
    }
    Image out(img.width, img.height, 1);
    const double* r = img.plane(0);
    const double* g = img.plane(1);
    const double* b = img.plane(2);
    double* y = out.plane(0);
    const std::size_t n = img.pixels_per_plane();
    for (std::size_t i = 0; i < n; ++i) {
        y[i] = kWr * r[i] + kWg * g[i] + kWb * b[i];
    }
    return out;
}

double psnr_y(const Image& pred, const Image& gt) {
    if (pred.width != gt.width || pred.height != gt.height) {
        throw DimensionError("psnr_y: image dimensions differ");
    }
    const Image py = luma(pred);
    const Image gy = luma(gt);
    const std::size_t n = py.pixels_per_plane();
    double sse = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = (static_cast<double>(encode_u8(py.data[i])) -
                          static_cast<double>(encode_u8(gy.data[i]))) / 255.0;
        sse += d * d;
    }
    if (sse == 0.0) {
        return std::numeric_limits<double>::infinity();
    }
    const double mse = sse / static_cast<double>(n);
    return 10.0 * std::log10(1.0 / mse);
}

Image crop(const Image& img, int row0, int col0, int w, int h) {
    if (row0 < 0 || col0 < 0 || w < 1 || h < 1 || row0 + h > img.height ||
        col0 + w > img.width) {
        throw DimensionError("crop rectangle out of bounds");
    }
    Image out(w, h, img.channels);
    for (int c = 0; c < img.channels; ++c) {
        for (int r = 0; r < h; ++r) {
            for (int x = 0; x < w; ++x) {
                out.at(r, x, c) = img.at(row0 + r, col0 + x, c);
            }
        }
    }
    return out;
}

} // namespace qsr
