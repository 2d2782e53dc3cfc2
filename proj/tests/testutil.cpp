#include "testutil.hpp"

#include <algorithm>
#include <cmath>

#include "core/rng.hpp"

namespace testutil {

namespace {

using qsr::Image;

double smooth_alpha(double signed_dist) {
    // full coverage one pixel inside the boundary, zero one pixel outside
    return std::clamp(0.5 * (signed_dist + 1.0), 0.0, 1.0);
}

void add_ellipse(Image& img, std::mt19937_64& rng) {
    const double cy = qsr::uniform01(rng) * img.height;
    const double cx = qsr::uniform01(rng) * img.width;
    const double ry = 3.0 + qsr::uniform01(rng) * img.height * 0.25;
    const double rx = 3.0 + qsr::uniform01(rng) * img.width * 0.25;
    const double theta = qsr::uniform01(rng) * M_PI;
    const double delta = (qsr::uniform01(rng) < 0.5 ? -1.0 : 1.0) *
                         (0.15 + 0.35 * qsr::uniform01(rng));
    const double ct = std::cos(theta), st = std::sin(theta);
    for (int r = 0; r < img.height; ++r) {
        for (int c = 0; c < img.width; ++c) {
            const double dy = r - cy, dx = c - cx;
            const double u = (ct * dx + st * dy) / rx;
            const double v = (-st * dx + ct * dy) / ry;
            const double q = std::sqrt(u * u + v * v);
            const double dist = (1.0 - q) * std::min(rx, ry);
            const double a = smooth_alpha(dist);
            if (a > 0.0) img.at(r, c) += a * delta;
        }
    }
}

void add_rectangle(Image& img, std::mt19937_64& rng) {
    const double cy = qsr::uniform01(rng) * img.height;
    const double cx = qsr::uniform01(rng) * img.width;
    const double hy = 3.0 + qsr::uniform01(rng) * img.height * 0.2;
    const double hx = 3.0 + qsr::uniform01(rng) * img.width * 0.2;
    const double theta = qsr::uniform01(rng) * M_PI;
    const double delta = (qsr::uniform01(rng) < 0.5 ? -1.0 : 1.0) *
                         (0.15 + 0.35 * qsr::uniform01(rng));
    const double ct = std::cos(theta), st = std::sin(theta);
    for (int r = 0; r < img.height; ++r) {
        for (int c = 0; c < img.width; ++c) {
            const double dy = r - cy, dx = c - cx;
            const double u = ct * dx + st * dy;
            const double v = -st * dx + ct * dy;
            const double dist = std::min(hx - std::fabs(u), hy - std::fabs(v));
            const double a = smooth_alpha(dist);
            if (a > 0.0) img.at(r, c) += a * delta;
        }
    }
}

void add_bar(Image& img, std::mt19937_64& rng) {
    // line segment with thickness
    const double y0 = qsr::uniform01(rng) * img.height;
    const double x0 = qsr::uniform01(rng) * img.width;
    const double y1 = qsr::uniform01(rng) * img.height;
    const double x1 = qsr::uniform01(rng) * img.width;
    const double half = 0.8 + 2.5 * qsr::uniform01(rng);
    const double delta = (qsr::uniform01(rng) < 0.5 ? -1.0 : 1.0) *
                         (0.2 + 0.3 * qsr::uniform01(rng));
    const double vx = x1 - x0, vy = y1 - y0;
    const double len_sq = std::max(1e-9, vx * vx + vy * vy);
    for (int r = 0; r < img.height; ++r) {
        for (int c = 0; c < img.width; ++c) {
            const double t = std::clamp(((c - x0) * vx + (r - y0) * vy) / len_sq, 0.0, 1.0);
            const double px = x0 + t * vx, py = y0 + t * vy;
            const double dist = half - std::hypot(c - px, r - py);
            const double a = smooth_alpha(dist);
            if (a > 0.0) img.at(r, c) += a * delta;
        }
    }
}

Image smoothed_noise(std::mt19937_64& rng, int w, int h, double amplitude) {
    Image noise(w, h, 1);
    for (auto& v : noise.data) {
        v = qsr::uniform01(rng) - 0.5;
    }
    // two box-blur passes
    for (int pass = 0; pass < 2; ++pass) {
        Image tmp = noise;
        for (int r = 0; r < h; ++r) {
            for (int c = 0; c < w; ++c) {
                double acc = 0.0;
                for (int dr = -1; dr <= 1; ++dr) {
                    for (int dc = -1; dc <= 1; ++dc) {
                        acc += tmp.at(std::clamp(r + dr, 0, h - 1),
                                      std::clamp(c + dc, 0, w - 1));
                    }
                }
                noise.at(r, c) = acc / 9.0;
            }
        }
    }
    for (auto& v : noise.data) {
        v *= amplitude * 6.0; // box passes shrink the range; rescale
    }
    return noise;
}

} // namespace

qsr::Image make_photo_image(std::uint64_t seed, int width, int height, int channels) {
    auto rng = qsr::make_rng(seed, 0x1347);
    Image luma(width, height, 1, 0.5);

    const int waves = 2 + static_cast<int>(qsr::uniform_below(rng, 3));
    for (int k = 0; k < waves; ++k) {
        const double fx = (qsr::uniform01(rng) - 0.5) * 3.0;
        const double fy = (qsr::uniform01(rng) - 0.5) * 3.0;
        const double phase = qsr::uniform01(rng) * 2.0 * M_PI;
        const double amp = 0.08 + 0.12 * qsr::uniform01(rng);
        for (int r = 0; r < height; ++r) {
            for (int c = 0; c < width; ++c) {
                luma.at(r, c) += amp * std::cos(2.0 * M_PI * (fx * c / width + fy * r / height) +
                                                phase);
            }
        }
    }

    const int shapes = 8 + static_cast<int>(qsr::uniform_below(rng, 10));
    for (int k = 0; k < shapes; ++k) {
        switch (qsr::uniform_below(rng, 3)) {
            case 0: add_ellipse(luma, rng); break;
            case 1: add_rectangle(luma, rng); break;
            default: add_bar(luma, rng); break;
        }
    }

    const Image noise = smoothed_noise(rng, width, height, 0.015 + 0.02 * qsr::uniform01(rng));
    for (std::size_t i = 0; i < luma.data.size(); ++i) {
        luma.data[i] += noise.data[i];
    }

    // affine squash into [0.04, 0.96]
    const auto [mn_it, mx_it] = std::minmax_element(luma.data.begin(), luma.data.end());
    const double mn = *mn_it, mx = *mx_it;
    const double span = std::max(1e-9, mx - mn);
    for (auto& v : luma.data) {
        v = 0.04 + 0.92 * (v - mn) / span;
    }
    if (channels == 1) {
        return luma;
    }

    Image rgb(width, height, 3);
    // gentle low-frequency chroma so channels stay correlated
    for (int ch = 0; ch < 3; ++ch) {
        const double fx = (qsr::uniform01(rng) - 0.5) * 2.0;
        const double fy = (qsr::uniform01(rng) - 0.5) * 2.0;
        const double phase = qsr::uniform01(rng) * 2.0 * M_PI;
        const double amp = 0.05 * qsr::uniform01(rng);
        for (int r = 0; r < height; ++r) {
            for (int c = 0; c < width; ++c) {
                const double tint =
                    amp * std::cos(2.0 * M_PI * (fx * c / width + fy * r / height) + phase);
                rgb.at(r, c, ch) = std::clamp(luma.at(r, c) + tint, 0.0, 1.0);
            }
        }
    }
    return rgb;
}

std::vector<qsr::Image> make_photo_corpus(std::uint64_t seed, int count, int min_dim,
                                          int max_dim, int channels) {
    std::vector<qsr::Image> corpus;
    corpus.reserve(count);
    auto rng = qsr::make_rng(seed, 0xc0b5);
    for (int i = 0; i < count; ++i) {
        const int w = min_dim + static_cast<int>(qsr::uniform_below(
                                    rng, static_cast<std::uint64_t>(max_dim - min_dim + 1)));
        const int h = min_dim + static_cast<int>(qsr::uniform_below(
                                    rng, static_cast<std::uint64_t>(max_dim - min_dim + 1)));
        corpus.push_back(make_photo_image(qsr::derive_seed(seed, i), w, h, channels));
    }
    return corpus;
}

qsr::QuboProblem random_qubo(std::uint64_t seed, int n, double scale) {
    auto rng = qsr::make_rng(seed, 0x9b0);
    Eigen::MatrixXd q(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            const double v = scale * (2.0 * qsr::uniform01(rng) - 1.0);
            q(i, j) = v;
            q(j, i) = v;
        }
    }
    Eigen::VectorXd b(n);
    for (int i = 0; i < n; ++i) {
        b[i] = scale * (2.0 * qsr::uniform01(rng) - 1.0);
    }
    return qsr::QuboProblem(std::move(q), std::move(b), 0.0);
}

double naive_energy(const qsr::QuboProblem& p, const std::vector<std::uint8_t>& z) {
    const int n = p.size();
    double e = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            e += static_cast<double>(z[i]) * p.q(i, j) * static_cast<double>(z[j]);
        }
    }
    for (int i = 0; i < n; ++i) {
        e += p.b[i] * static_cast<double>(z[i]);
    }
    return e;
}

std::vector<std::uint8_t> bits_of(std::uint64_t value, int n) {
    std::vector<std::uint8_t> z(n);
    for (int i = 0; i < n; ++i) {
        z[i] = (value >> i) & 1;
    }
    return z;
}

BruteResult naive_brute_force(const qsr::QuboProblem& p) {
    const int n = p.size();
    BruteResult best;
    best.argmin = bits_of(0, n);
    best.min_energy = naive_energy(p, best.argmin);
    for (std::uint64_t v = 1; v < (1ULL << n); ++v) {
        const auto z = bits_of(v, n);
        const double e = naive_energy(p, z);
        if (e < best.min_energy) {
            best.min_energy = e;
            best.argmin = z;
        }
    }
    return best;
}

} // namespace testutil
