#pragma once

#include <cstdint>
#include <vector>

namespace qsr {

// Planar, row-major raster with floating-point intensities nominally in
// [0,1]. Plane c starts at data[c * width * height]; clamping happens only
// when encoding to 8-bit, never in internal arithmetic.
struct Image {
    int width = 0;
    int height = 0;
    int channels = 0;
    std::vector<double> data;

    Image() = default;
    Image(int w, int h, int c, double fill = 0.0);

    double& at(int row, int col, int ch = 0) {
        return data[static_cast<std::size_t>(ch) * width * height +
                    static_cast<std::size_t>(row) * width + col];
    }
    double at(int row, int col, int ch = 0) const {
        return data[static_cast<std::size_t>(ch) * width * height +
                    static_cast<std::size_t>(row) * width + col];
    }
    double* plane(int ch) { return data.data() + static_cast<std::size_t>(ch) * width * height; }
    const double* plane(int ch) const {
        return data.data() + static_cast<std::size_t>(ch) * width * height;
    }
    std::size_t pixels_per_plane() const {
        return static_cast<std::size_t>(width) * height;
    }
    bool same_shape(const Image& o) const {
        return width == o.width && height == o.height && channels == o.channels;
    }
};

// 8-bit encode rule shared by the image writers and PSNR: clamp to [0,1],
// scale by 255 and round half away from zero.
std::uint8_t encode_u8(double v);

// ITU-R BT.601 full-range luma/chroma. Inputs must be 3-channel; the pair is
// mutually inverse to floating-point precision.
Image rgb_to_ycbcr(const Image& img);
Image ycbcr_to_rgb(const Image& img);

// Extracts the luma plane: channel 0 of a 1-channel image, or BT.601 Y for
// RGB input.
Image luma(const Image& img);

// Y-channel PSNR in dB over [0,1] intensities, computed after 8-bit
// quantization of both images. Identical images return +infinity.
double psnr_y(const Image& pred, const Image& gt);

Image crop(const Image& img, int row0, int col0, int w, int h);

} // namespace qsr
