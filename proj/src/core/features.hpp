#pragma once

#include <vector>

#include <Eigen/Core>

#include "core/image.hpp"

namespace qsr {

// One separable 1-D correlation kernel applied along rows or columns.
struct FeatureFilter {
    std::vector<double> taps;
    bool vertical = false;
};

using FilterBank = std::vector<FeatureFilter>;

// First- and second-order gradient filters in both orientations; the feature
// transform used throughout for low-resolution patches.
FilterBank gradient_filter_bank();

// Correlates a single-channel image with each filter in the bank,
// edge-clamped, and stacks the responses as channels.
Image apply_filter_bank(const Image& y, const FilterBank& bank);

// Bicubically upsamples the single-channel input by `scale` and applies the
// gradient bank, yielding a 4-channel feature map at the upscaled size.
Image extract_features(const Image& lr, int scale);

struct PatchGrid {
    int patch_size = 0;
    int stride = 0;
    // top-left anchors, column-major: column index varies slowest
    std::vector<std::pair<int, int>> positions;
};

// Anchors at {0, stride, 2*stride, ...} plus a flush anchor at dim−patch
// when the stride does not land there exactly.
PatchGrid make_patch_grid(int width, int height, int patch_size, int stride);

// Concatenates a square patch over all channels, channel-major then
// row-major. `step` spaces the samples inside the window (step > 1 reads a
// patch_size×patch_size lattice spread over (patch_size−1)*step+1 pixels).
Eigen::VectorXd extract_patch_vector(const Image& map, int row, int col, int patch_size,
                                     int step = 1);

// Inverse of extract_patch_vector for step == 1: writes the vector back into
// the image at the anchor.
void scatter_patch_vector(Image& map, int row, int col, int patch_size,
                          const Eigen::VectorXd& v);

} // namespace qsr
