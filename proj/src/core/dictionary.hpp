#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "core/image.hpp"

namespace qsr {

// Coupled dictionaries with shared atoms: d_l codes low-resolution feature
// patches, d_h synthesizes high-resolution pixel patches from the same
// coefficients. Each joint atom [d_l/sqrt(m_l); d_h/sqrt(m_h)] has unit
// l2 norm.
struct DictionaryPair {
    Eigen::MatrixXd d_l; // m_l x n_atoms
    Eigen::MatrixXd d_h; // m_h x n_atoms
    int patch_size_lr = 3;
    int patch_size_hr = 9;
    int scale = 3;
    bool mean_removed = true;
    int n_atoms() const { return static_cast<int>(d_l.cols()); }
    int m_l() const { return static_cast<int>(d_l.rows()); }
    int m_h() const { return static_cast<int>(d_h.rows()); }
};

struct TrainConfig {
    int n_atoms = 128;
    int n_patches = 30000;
    double variance_floor = 1e-4;
    int iterations = 20; // epochs over the sampled patches
    double sparsity_lambda = 5e-4;
    std::uint64_t seed = 0;

    // geometry of the coupled patches
    int scale = 3;
    int patch_size_hr = 9;
    int patch_size_lr = 3;
    bool mean_removed = true;

    int minibatch = 256;
    int sample_stride = 3; // anchor spacing when enumerating candidates
    int threads = 1;
};

struct TrainStats {
    // mean lasso objective on a held-out slice, one entry per epoch
    std::vector<double> heldout_objective;
    int reseeded_atoms = 0;
};

// Pairs of (feature vector, HR pixel patch) sampled from an HR corpus. For
// each image the LR counterpart is synthesized by bicubic decimation; pairs
// whose HR patch variance falls below the floor are pruned; n_patches
// survivors are drawn uniformly without replacement.
void sample_training_patches(const std::vector<Image>& corpus, const TrainConfig& cfg,
                             Eigen::MatrixXd& lr_features, Eigen::MatrixXd& hr_patches);

// Joint online dictionary learning over the concatenated, dimension-weighted
// pairs; alternates minibatch sparse coding with block-coordinate atom
// updates. Atoms unused for a full epoch are reseeded from the worst
// reconstructed sample.
DictionaryPair train_dictionary_pair(const Eigen::MatrixXd& lr_features,
                                     const Eigen::MatrixXd& hr_patches, const TrainConfig& cfg,
                                     TrainStats* stats = nullptr);

// Binary container: magic "QSRD", little-endian u16 version, length-prefixed
// JSON header, row-major f64 payloads for d_l then d_h, trailing CRC32.
void save_dictionary(const DictionaryPair& pair, const std::string& path);
DictionaryPair load_dictionary(const std::string& path);

} // namespace qsr
