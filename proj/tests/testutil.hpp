#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "core/image.hpp"
#include "core/qubo.hpp"

namespace testutil {

// Deterministic photographic-looking test images: low-frequency shading,
// anti-aliased geometric shapes with sharp edges, and mild texture noise.
qsr::Image make_photo_image(std::uint64_t seed, int width, int height, int channels = 3);

std::vector<qsr::Image> make_photo_corpus(std::uint64_t seed, int count, int min_dim = 96,
                                          int max_dim = 150, int channels = 3);

// Random dense symmetric QUBO with entries uniform in [-scale, scale].
qsr::QuboProblem random_qubo(std::uint64_t seed, int n, double scale = 1.0);

// Plain double-loop energy evaluation; deliberately independent of the
// library's evaluator.
double naive_energy(const qsr::QuboProblem& p, const std::vector<std::uint8_t>& z);

// Exhaustive minimum by naive enumeration (no incremental tricks).
struct BruteResult {
    std::vector<std::uint8_t> argmin;
    double min_energy = 0.0;
};
BruteResult naive_brute_force(const qsr::QuboProblem& p);

std::vector<std::uint8_t> bits_of(std::uint64_t value, int n);

} // namespace testutil
