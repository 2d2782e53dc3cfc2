#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "core/dictionary.hpp"
#include "core/image.hpp"
#include "core/qubo.hpp"
#include "core/solvers.hpp"

namespace qsr {

struct SrConfig {
    int scale = 3;
    double lambda_lasso = 1e-5;
    double lambda_anneal = 0.1;
    double mu = 0.05;
    // beta for the Boltzmann weights; by default it adapts per patch to the
    // spread of read energies, with `beta` as the fixed override
    double beta = 1.0;
    bool beta_adaptive = true;
    int n_reads = 100;
    int backproject_iters = 100;
    std::uint64_t seed = 0;
    int threads = 1;

    // batched-subproblem geometry (sub_size >= n_atoms disables clamping)
    int sub_size = 32;
    int batch_size = 512;
    TabuConfig tabu{};
};

struct PhaseTimings {
    double cpu_opt = 0.0;
    double create_qubo = 0.0;
    double sampler_prep = 0.0;
    double sampler_opt = 0.0;
    double misc = 0.0;
    double total() const { return cpu_opt + create_qubo + sampler_prep + sampler_opt + misc; }
};

struct EntropyEntry {
    int row = 0;
    int col = 0;
    double entropy = 0.0;
};

struct SrOutput {
    Image image;
    std::optional<Image> entropy_map; // per-patch entropy painted over footprints
    std::vector<EntropyEntry> entropy_table;
    PhaseTimings timings;
};

// Overlap-averaging canvas: patches add into value and weight planes;
// finalize() divides and fails if any pixel was never covered.
class PatchAccumulator {
public:
    PatchAccumulator(int width, int height);
    void add(const Eigen::VectorXd& patch, int row, int col, int patch_size);
    Image finalize() const;

private:
    Image canvas_;
    Image weights_;
};

// Gaussian blur (sigma 1, 7 taps) followed by center decimation; the forward
// operator of the reconstruction constraint enforced by backproject().
Image blur_decimate(const Image& hr, int scale);

// Iterative backprojection: x += spread(lr - blur_decimate(x)) using the
// exact adjoint of the forward operator. The LR residual norm is
// non-increasing by construction; per-iteration norms are exposed for
// inspection via `residuals`.
Image backproject(const Image& x0, const Image& lr, const SrConfig& cfg,
                  std::vector<double>* residuals = nullptr);

// p_j proportional to O_j * exp(-beta * (E_j - min E)), normalized to sum 1.
Eigen::VectorXd boltzmann_weights(const Eigen::VectorXd& energies,
                                  const Eigen::VectorXd& occurrences, double beta);

double entropy_of(const Eigen::VectorXd& probabilities);

// Patch-wise lasso sparse coding against d_l, synthesis through d_h.
SrOutput sr_lasso(const Image& lr, const DictionaryPair& dict, const SrConfig& cfg);

// Patch-wise binary sparse coding: each patch's QUBO is sampled whole and
// the best read becomes the mask.
SrOutput sr_classical_anneal(const Image& lr, const DictionaryPair& dict, const SrConfig& cfg,
                             Sampler& sampler);

// Tabu warm start, clamped 32-variable subproblems batched along the
// diagonals of fixed-size problems, Boltzmann-weighted synthesis over the
// returned reads, and a per-patch entropy map.
SrOutput sr_ensemble_anneal(const Image& lr, const DictionaryPair& dict, const SrConfig& cfg,
                            Sampler& sampler);

// Same plumbing as sr_ensemble_anneal but each patch uses only its single
// best read (point estimate) instead of the weighted mean.
SrOutput sr_ensemble_point(const Image& lr, const DictionaryPair& dict, const SrConfig& cfg,
                           Sampler& sampler);

struct QuboBatchPlan {
    SubproblemBatch batch;
    std::vector<QuboProblem> subproblems; // one per patch
    std::vector<std::vector<std::uint8_t>> warm_masks;
    std::vector<std::vector<int>> indices;
};

// Per patch: build the sparse-coding QUBO, tabu-search a warm mask, select
// the highest-impact variables, clamp the rest, and append the subproblem to
// the running batch.
QuboBatchPlan create_qubo_batch(const Image& features, const DictionaryPair& dict,
                                const SrConfig& cfg);

void write_entropy_csv(const SrOutput& out, const std::string& path);

// Entropy map scaled by its maximum (all black when every patch has zero
// entropy) and encoded as a single-channel image file.
void write_entropy_image(const SrOutput& out, const std::string& path);

} // namespace qsr
