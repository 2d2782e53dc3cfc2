#include "core/features.hpp"

#include <algorithm>

#include "core/errors.hpp"
#include "core/resample.hpp"

namespace qsr {

FilterBank gradient_filter_bank() {
    return {
        {{-1.0, 0.0, 1.0}, false},
        {{-1.0, 0.0, 1.0}, true},
        {{1.0, 0.0, -2.0, 0.0, 1.0}, false},
        {{1.0, 0.0, -2.0, 0.0, 1.0}, true},
    };
}

namespace {

// edge-clamped 1-D correlation along rows (vertical=false) or columns
void correlate(const double* src, int w, int h, const FeatureFilter& f, double* dst) {
    const int n = static_cast<int>(f.taps.size());
    const int center = n / 2;
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            double acc = 0.0;
            for (int k = 0; k < n; ++k) {
                const int off = k - center;
                const int rr = f.vertical ? std::clamp(r + off, 0, h - 1) : r;
                const int cc = f.vertical ? c : std::clamp(c + off, 0, w - 1);
                acc += f.taps[k] * src[static_cast<std::size_t>(rr) * w + cc];
            }
            dst[static_cast<std::size_t>(r) * w + c] = acc;
        }
    }
}

} // namespace

Image apply_filter_bank(const Image& y, const FilterBank& bank) {
    if (y.channels != 1) {
        throw DimensionError("feature extraction expects a single-channel image");
    }
    if (bank.empty()) {
        throw ArgumentError("empty filter bank");
    }
    Image out(y.width, y.height, static_cast<int>(bank.size()));
    for (std::size_t i = 0; i < bank.size(); ++i) {
        correlate(y.plane(0), y.width, y.height, bank[i], out.plane(static_cast<int>(i)));
    }
    return out;
}

Image extract_features(const Image& lr, int scale) {
    if (lr.channels != 1) {
        throw DimensionError("extract_features expects a single-channel image");
    }
    const Image up = resample(lr, lr.width * scale, lr.height * scale, ResampleKernel::bicubic());
    return apply_filter_bank(up, gradient_filter_bank());
}

namespace {

std::vector<int> axis_anchors(int dim, int patch, int stride) {
    std::vector<int> anchors;
    const int last = dim - patch;
    for (int a = 0; a <= last; a += stride) {
        anchors.push_back(a);
    }
    if (anchors.back() != last) {
        anchors.push_back(last);
    }
    return anchors;
}

} // namespace

PatchGrid make_patch_grid(int width, int height, int patch_size, int stride) {
    if (patch_size > std::min(width, height)) {
        throw DimensionError("patch larger than image");
    }
    if (stride < 1 || patch_size < 1) {
        throw ArgumentError("patch size and stride must be >= 1");
    }
    PatchGrid g;
    g.patch_size = patch_size;
    g.stride = stride;
    const auto rows = axis_anchors(height, patch_size, stride);
    const auto cols = axis_anchors(width, patch_size, stride);
    g.positions.reserve(rows.size() * cols.size());
    for (int c : cols) {
        for (int r : rows) {
            g.positions.emplace_back(r, c);
        }
    }
    return g;
}

Eigen::VectorXd extract_patch_vector(const Image& map, int row, int col, int patch_size,
                                     int step) {
    const int span = (patch_size - 1) * step + 1;
    if (row < 0 || col < 0 || row + span > map.height || col + span > map.width) {
        throw DimensionError("patch anchor out of bounds");
    }
    Eigen::VectorXd v(static_cast<Eigen::Index>(map.channels) * patch_size * patch_size);
    Eigen::Index idx = 0;
    for (int c = 0; c < map.channels; ++c) {
        for (int i = 0; i < patch_size; ++i) {
            for (int j = 0; j < patch_size; ++j) {
                v[idx++] = map.at(row + i * step, col + j * step, c);
            }
        }
    }
    return v;
}

void scatter_patch_vector(Image& map, int row, int col, int patch_size,
                          const Eigen::VectorXd& v) {
    if (v.size() != static_cast<Eigen::Index>(map.channels) * patch_size * patch_size) {
        throw DimensionError("patch vector length mismatch");
    }
    if (row < 0 || col < 0 || row + patch_size > map.height || col + patch_size > map.width) {
        throw DimensionError("patch anchor out of bounds");
    }
    Eigen::Index idx = 0;
    for (int c = 0; c < map.channels; ++c) {
        for (int i = 0; i < patch_size; ++i) {
            for (int j = 0; j < patch_size; ++j) {
                map.at(row + i, col + j, c) = v[idx++];
            }
        }
    }
}

} // namespace qsr
