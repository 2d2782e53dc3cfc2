#include "core/sr.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>

#include "core/errors.hpp"
#include "core/features.hpp"
#include "core/image_io.hpp"
#include "core/parallel.hpp"
#include "core/resample.hpp"
#include "core/rng.hpp"

namespace qsr {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct PhaseTimer {
    Clock::time_point start = Clock::now();
    double stop() const { return seconds_since(start); }
};

} // namespace

PatchAccumulator::PatchAccumulator(int width, int height)
    : canvas_(width, height, 1, 0.0), weights_(width, height, 1, 0.0) {}

void PatchAccumulator::add(const Eigen::VectorXd& patch, int row, int col, int patch_size) {
    if (patch.size() != static_cast<Eigen::Index>(patch_size) * patch_size) {
        throw DimensionError("patch vector length mismatch");
    }
    if (row < 0 || col < 0 || row + patch_size > canvas_.height ||
        col + patch_size > canvas_.width) {
        throw DimensionError("patch placement out of bounds");
    }
    Eigen::Index idx = 0;
    for (int i = 0; i < patch_size; ++i) {
        for (int j = 0; j < patch_size; ++j) {
            canvas_.at(row + i, col + j) += patch[idx++];
            weights_.at(row + i, col + j) += 1.0;
        }
    }
}

Image PatchAccumulator::finalize() const {
    Image out(canvas_.width, canvas_.height, 1);
    for (std::size_t i = 0; i < out.data.size(); ++i) {
        if (weights_.data[i] == 0.0) {
            throw DataError("uncovered pixel at finalize; stride exceeds patch size");
        }
        out.data[i] = canvas_.data[i] / weights_.data[i];
    }
    return out;
}

namespace {

// normalized 7-tap Gaussian, sigma 1
const std::array<double, 7>& blur_taps() {
    static const std::array<double, 7> taps = [] {
        std::array<double, 7> t{};
        double sum = 0.0;
        for (int k = -3; k <= 3; ++k) {
            t[k + 3] = std::exp(-0.5 * k * k);
            sum += t[k + 3];
        }
        for (auto& v : t) v /= sum;
        return t;
    }();
    return taps;
}

// edge-clamped separable Gaussian (gather form)
Image gaussian_blur(const Image& img) {
    const auto& taps = blur_taps();
    Image tmp(img.width, img.height, 1);
    Image out(img.width, img.height, 1);
    for (int r = 0; r < img.height; ++r) {
        for (int c = 0; c < img.width; ++c) {
            double acc = 0.0;
            for (int k = -3; k <= 3; ++k) {
                acc += taps[k + 3] * img.at(r, std::clamp(c + k, 0, img.width - 1));
            }
            tmp.at(r, c) = acc;
        }
    }
    for (int r = 0; r < img.height; ++r) {
        for (int c = 0; c < img.width; ++c) {
            double acc = 0.0;
            for (int k = -3; k <= 3; ++k) {
                acc += taps[k + 3] * tmp.at(std::clamp(r + k, 0, img.height - 1), c);
            }
            out.at(r, c) = acc;
        }
    }
    return out;
}

// exact adjoint of gaussian_blur: scatter with the same clamped indexing,
// axes applied in reverse order
Image gaussian_blur_adjoint(const Image& img) {
    const auto& taps = blur_taps();
    Image tmp(img.width, img.height, 1, 0.0);
    Image out(img.width, img.height, 1, 0.0);
    for (int r = 0; r < img.height; ++r) {
        for (int c = 0; c < img.width; ++c) {
            const double v = img.at(r, c);
            if (v == 0.0) continue;
            for (int k = -3; k <= 3; ++k) {
                tmp.at(std::clamp(r + k, 0, img.height - 1), c) += taps[k + 3] * v;
            }
        }
    }
    for (int r = 0; r < img.height; ++r) {
        for (int c = 0; c < img.width; ++c) {
            const double v = tmp.at(r, c);
            if (v == 0.0) continue;
            for (int k = -3; k <= 3; ++k) {
                out.at(r, std::clamp(c + k, 0, img.width - 1)) += taps[k + 3] * v;
            }
        }
    }
    return out;
}

} // namespace

Image blur_decimate(const Image& hr, int scale) {
    if (hr.channels != 1) {
        throw DimensionError("blur_decimate expects a single-channel image");
    }
    if (hr.width % scale != 0 || hr.height % scale != 0) {
        throw DimensionError("image dimensions must be divisible by the scale");
    }
    const Image blurred = gaussian_blur(hr);
    const int off = scale / 2;
    Image lr(hr.width / scale, hr.height / scale, 1);
    for (int r = 0; r < lr.height; ++r) {
        for (int c = 0; c < lr.width; ++c) {
            lr.at(r, c) = blurred.at(r * scale + off, c * scale + off);
        }
    }
    return lr;
}

Image backproject(const Image& x0, const Image& lr, const SrConfig& cfg,
                  std::vector<double>* residuals) {
    if (x0.channels != 1 || lr.channels != 1) {
        throw DimensionError("backproject works on single-channel images");
    }
    if (x0.width != lr.width * cfg.scale || x0.height != lr.height * cfg.scale) {
        throw DimensionError("backproject: HR dimensions must be scale times LR");
    }
    const int off = cfg.scale / 2;
    Image x = x0;
    if (residuals) residuals->clear();
    double prev = std::numeric_limits<double>::infinity();
    for (int iter = 0; iter < cfg.backproject_iters; ++iter) {
        const Image lr_hat = blur_decimate(x, cfg.scale);
        double norm_sq = 0.0;
        Image residual_up(x.width, x.height, 1, 0.0);
        for (int r = 0; r < lr.height; ++r) {
            for (int c = 0; c < lr.width; ++c) {
                const double e = lr.at(r, c) - lr_hat.at(r, c);
                norm_sq += e * e;
                residual_up.at(r * cfg.scale + off, c * cfg.scale + off) = e;
            }
        }
        const double norm = std::sqrt(norm_sq);
        if (residuals) residuals->push_back(norm);
        if (norm > prev * (1.0 + 1e-9) + 1e-12) {
            throw Error(ErrorCode::internal, "backprojection residual increased");
        }
        prev = norm;
        if (norm == 0.0) {
            break;
        }
        const Image correction = gaussian_blur_adjoint(residual_up);
        for (std::size_t i = 0; i < x.data.size(); ++i) {
            x.data[i] += correction.data[i];
        }
    }
    return x;
}

Eigen::VectorXd boltzmann_weights(const Eigen::VectorXd& energies,
                                  const Eigen::VectorXd& occurrences, double beta) {
    if (energies.size() == 0) {
        throw ArgumentError("boltzmann_weights: empty input");
    }
    if (energies.size() != occurrences.size()) {
        throw DimensionError("boltzmann_weights: length mismatch");
    }
    const double e_min = energies.minCoeff();
    Eigen::VectorXd p(energies.size());
    for (Eigen::Index j = 0; j < energies.size(); ++j) {
        if (occurrences[j] < 1.0) {
            throw ArgumentError("boltzmann_weights: occurrences must be >= 1");
        }
        p[j] = occurrences[j] * std::exp(-beta * (energies[j] - e_min));
    }
    const double z = p.sum();
    if (!(z > 0.0) || !std::isfinite(z)) {
        throw ArgumentError("boltzmann_weights: degenerate weights");
    }
    return p / z;
}

double entropy_of(const Eigen::VectorXd& probabilities) {
    double h = 0.0;
    for (Eigen::Index j = 0; j < probabilities.size(); ++j) {
        const double p = probabilities[j];
        if (p > 0.0) {
            h -= p * std::log(p);
        }
    }
    return std::max(0.0, h);
}

namespace {

struct PipelineContext {
    Image y_lr;             // single-channel input
    Image cb_up, cr_up;     // empty for 1-channel input
    bool color = false;
    Image up;               // bicubic-upsampled luma
    Image feats;            // 4-channel gradient features of `up`
    PatchGrid grid;
    int hr_w = 0, hr_h = 0;
};

PipelineContext prepare(const Image& lr, const DictionaryPair& dict, const SrConfig& cfg) {
    if (dict.scale != cfg.scale) {
        throw ArgumentError("dictionary scale does not match configuration");
    }
    PipelineContext ctx;
    if (lr.channels == 3) {
        ctx.color = true;
        const Image ycc = rgb_to_ycbcr(lr);
        ctx.y_lr = Image(lr.width, lr.height, 1);
        Image cb(lr.width, lr.height, 1), cr(lr.width, lr.height, 1);
        std::copy_n(ycc.plane(0), ycc.pixels_per_plane(), ctx.y_lr.plane(0));
        std::copy_n(ycc.plane(1), ycc.pixels_per_plane(), cb.plane(0));
        std::copy_n(ycc.plane(2), ycc.pixels_per_plane(), cr.plane(0));
        ctx.cb_up = resample(cb, lr.width * cfg.scale, lr.height * cfg.scale);
        ctx.cr_up = resample(cr, lr.width * cfg.scale, lr.height * cfg.scale);
    } else if (lr.channels == 1) {
        ctx.y_lr = lr;
    } else {
        throw DimensionError("super-resolution expects a 1- or 3-channel image");
    }
    ctx.hr_w = lr.width * cfg.scale;
    ctx.hr_h = lr.height * cfg.scale;
    if (ctx.hr_w < dict.patch_size_hr || ctx.hr_h < dict.patch_size_hr) {
        throw DimensionError("input too small for the dictionary patch size");
    }
    ctx.up = resample(ctx.y_lr, ctx.hr_w, ctx.hr_h);
    ctx.feats = apply_filter_bank(ctx.up, gradient_filter_bank());
    ctx.grid = make_patch_grid(ctx.hr_w, ctx.hr_h, dict.patch_size_hr,
                               std::max(1, dict.patch_size_hr - 1));
    return ctx;
}

Image finish_pipeline(const PipelineContext& ctx, const DictionaryPair& dict,
                      const SrConfig& cfg, const std::vector<Eigen::VectorXd>& patches) {
    PatchAccumulator acc(ctx.hr_w, ctx.hr_h);
    const int p = dict.patch_size_hr;
    for (std::size_t i = 0; i < ctx.grid.positions.size(); ++i) {
        const auto& [r, c] = ctx.grid.positions[i];
        acc.add(patches[i], r, c, p);
    }
    Image y_sr = backproject(acc.finalize(), ctx.y_lr, cfg);
    if (!ctx.color) {
        return y_sr;
    }
    Image ycc(ctx.hr_w, ctx.hr_h, 3);
    std::copy_n(y_sr.plane(0), y_sr.pixels_per_plane(), ycc.plane(0));
    std::copy_n(ctx.cb_up.plane(0), ctx.cb_up.pixels_per_plane(), ycc.plane(1));
    std::copy_n(ctx.cr_up.plane(0), ctx.cr_up.pixels_per_plane(), ycc.plane(2));
    return ycbcr_to_rgb(ycc);
}

double patch_mean_base(const PipelineContext& ctx, const DictionaryPair& dict, int row,
                       int col) {
    if (!dict.mean_removed) {
        return 0.0;
    }
    double sum = 0.0;
    for (int i = 0; i < dict.patch_size_hr; ++i) {
        for (int j = 0; j < dict.patch_size_hr; ++j) {
            sum += ctx.up.at(row + i, col + j);
        }
    }
    return sum / (static_cast<double>(dict.patch_size_hr) * dict.patch_size_hr);
}

Eigen::VectorXd feature_vector(const PipelineContext& ctx, const DictionaryPair& dict, int row,
                               int col) {
    return extract_patch_vector(ctx.feats, row, col, dict.patch_size_lr, dict.scale);
}

Image paint_entropy(const PipelineContext& ctx, int patch_size,
                    const std::vector<double>& entropies) {
    Image map(ctx.hr_w, ctx.hr_h, 1, 0.0);
    for (std::size_t i = 0; i < ctx.grid.positions.size(); ++i) {
        const auto& [r, c] = ctx.grid.positions[i];
        for (int a = 0; a < patch_size; ++a) {
            for (int b = 0; b < patch_size; ++b) {
                map.at(r + a, c + b) = entropies[i];
            }
        }
    }
    return map;
}

} // namespace

SrOutput sr_lasso(const Image& lr, const DictionaryPair& dict, const SrConfig& cfg) {
    const PhaseTimer total;
    PipelineContext ctx = prepare(lr, dict, cfg);
    const std::size_t n = ctx.grid.positions.size();
    std::vector<Eigen::VectorXd> patches(n);
    const Eigen::MatrixXd gram = dict.d_l.transpose() * dict.d_l;

    const PhaseTimer solve_timer;
    parallel_for(n, cfg.threads, [&](std::size_t i) {
        const auto& [r, c] = ctx.grid.positions[i];
        const Eigen::VectorXd f = feature_vector(ctx, dict, r, c);
        Eigen::VectorXd alpha = lasso_solve_gram(gram, dict.d_l.transpose() * f,
                                                 cfg.lambda_lasso);
        patches[i] = dict.d_h * alpha;
        patches[i].array() += patch_mean_base(ctx, dict, r, c);
    });
    const double solve_s = solve_timer.stop();

    SrOutput out;
    out.image = finish_pipeline(ctx, dict, cfg, patches);
    out.timings.cpu_opt = solve_s;
    out.timings.misc = total.stop() - solve_s;
    return out;
}

SrOutput sr_classical_anneal(const Image& lr, const DictionaryPair& dict, const SrConfig& cfg,
                             Sampler& sampler) {
    const PhaseTimer total;
    PipelineContext ctx = prepare(lr, dict, cfg);
    const std::size_t n = ctx.grid.positions.size();
    std::vector<Eigen::VectorXd> patches(n);

    const PhaseTimer solve_timer;
    // the sampler parallelizes its reads internally; keep the patch loop
    // sequential so replay recordings land in patch order
    sampler.set_threads(cfg.threads);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& [r, c] = ctx.grid.positions[i];
        const Eigen::VectorXd f = feature_vector(ctx, dict, r, c);
        const QuboProblem p = build_sparse_coding_qubo(dict.d_l, f, cfg.lambda_anneal, cfg.mu);
        const SampleSet reads = sampler.sample(p, cfg.n_reads);
        // canonical order puts the best read first
        const auto& best = reads.solutions.front();
        Eigen::VectorXd alpha(dict.n_atoms());
        for (int j = 0; j < dict.n_atoms(); ++j) {
            alpha[j] = cfg.mu * best[j];
        }
        patches[i] = dict.d_h * alpha;
        patches[i].array() += patch_mean_base(ctx, dict, r, c);
    }
    const double solve_s = solve_timer.stop();

    SrOutput out;
    out.image = finish_pipeline(ctx, dict, cfg, patches);
    out.timings.cpu_opt = solve_s;
    out.timings.misc = total.stop() - solve_s;
    return out;
}

QuboBatchPlan create_qubo_batch(const Image& features, const DictionaryPair& dict,
                                const SrConfig& cfg) {
    const PatchGrid grid = make_patch_grid(features.width, features.height, dict.patch_size_hr,
                                           std::max(1, dict.patch_size_hr - 1));
    const std::size_t n = grid.positions.size();
    const int sub_size = std::min(cfg.sub_size, dict.n_atoms());

    QuboBatchPlan plan;
    plan.subproblems.resize(n);
    plan.warm_masks.resize(n);
    plan.indices.resize(n);
    std::vector<QuboProblem> problems(n);
    parallel_for(n, cfg.threads, [&](std::size_t i) {
        const auto& [r, c] = grid.positions[i];
        const Eigen::VectorXd f =
            extract_patch_vector(features, r, c, dict.patch_size_lr, dict.scale);
        QuboProblem p = build_sparse_coding_qubo(dict.d_l, f, cfg.lambda_anneal, cfg.mu);
        TabuConfig tabu = cfg.tabu;
        tabu.seed = derive_seed(cfg.seed, i);
        std::vector<std::uint8_t> warm = tabu_search(p, tabu);
        plan.indices[i] = energy_impact_select(p, warm, sub_size);
        plan.subproblems[i] = clamp_subproblem(p, warm, plan.indices[i]);
        plan.warm_masks[i] = std::move(warm);
        problems[i] = std::move(p);
    });
    plan.batch = assemble_batch(plan.subproblems, cfg.batch_size);
    return plan;
}

namespace {

SrOutput run_ensemble(const Image& lr, const DictionaryPair& dict, const SrConfig& cfg,
                      Sampler& sampler, bool point_estimate) {
    const PhaseTimer total;
    PipelineContext ctx = prepare(lr, dict, cfg);
    const std::size_t n = ctx.grid.positions.size();

    const PhaseTimer build_timer;
    QuboBatchPlan plan = create_qubo_batch(ctx.feats, dict, cfg);
    const double build_s = build_timer.stop();

    const PhaseTimer opt_timer;
    sampler.set_threads(cfg.threads);
    std::vector<SampleSet> batch_reads;
    batch_reads.reserve(plan.batch.problems.size());
    for (const auto& problem : plan.batch.problems) {
        batch_reads.push_back(sampler.sample(problem, cfg.n_reads));
    }
    const double opt_s = opt_timer.stop();

    const PhaseTimer prep_timer;
    const std::vector<SampleSet> per_patch =
        disassemble_batch(plan.batch, plan.subproblems, batch_reads);
    const double prep_s = prep_timer.stop();

    std::vector<Eigen::VectorXd> patches(n);
    std::vector<double> entropies(n, 0.0);
    parallel_for(n, cfg.threads, [&](std::size_t i) {
        const auto& [r, c] = ctx.grid.positions[i];
        const SampleSet& reads = per_patch[i];
        const Eigen::Index j_count = static_cast<Eigen::Index>(reads.size());
        Eigen::VectorXd energies(j_count), occurrences(j_count);
        for (Eigen::Index j = 0; j < j_count; ++j) {
            energies[j] = reads.energies[j];
            occurrences[j] = static_cast<double>(reads.occurrences[j]);
        }
        double beta = cfg.beta;
        if (cfg.beta_adaptive) {
            const double w_sum = occurrences.sum();
            const double mean = energies.dot(occurrences) / w_sum;
            const double var =
                (energies.array() - mean).square().matrix().dot(occurrences) / w_sum;
            const double sd = std::sqrt(std::max(0.0, var));
            beta = sd > 1e-12 ? 1.0 / sd : 0.0;
        }
        Eigen::VectorXd p = boltzmann_weights(energies, occurrences, beta);
        if (point_estimate) {
            // canonical order: index 0 is the lowest-energy read
            p.setZero();
            p[0] = 1.0;
        }
        entropies[i] = entropy_of(p);

        // alpha = mu * warm mask, with the clamped positions replaced by the
        // read's bits; weighted mean taken over the coefficients
        const auto& warm = plan.warm_masks[i];
        const auto& index = plan.indices[i];
        Eigen::VectorXd base(dict.n_atoms());
        for (int a = 0; a < dict.n_atoms(); ++a) {
            base[a] = cfg.mu * warm[a];
        }
        Eigen::VectorXd alpha_mean = Eigen::VectorXd::Zero(dict.n_atoms());
        for (Eigen::Index j = 0; j < j_count; ++j) {
            if (p[j] == 0.0) continue;
            Eigen::VectorXd alpha = base;
            for (std::size_t a = 0; a < index.size(); ++a) {
                alpha[index[a]] = cfg.mu * reads.solutions[j][a];
            }
            alpha_mean += p[j] * alpha;
        }
        patches[i] = dict.d_h * alpha_mean;
        patches[i].array() += patch_mean_base(ctx, dict, r, c);
    });

    SrOutput out;
    out.image = finish_pipeline(ctx, dict, cfg, patches);
    out.entropy_map = paint_entropy(ctx, dict.patch_size_hr, entropies);
    out.entropy_table.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& [r, c] = ctx.grid.positions[i];
        out.entropy_table.push_back({r, c, entropies[i]});
    }
    out.timings.create_qubo = build_s;
    out.timings.sampler_opt = opt_s;
    out.timings.sampler_prep = prep_s;
    out.timings.misc = total.stop() - build_s - opt_s - prep_s;
    return out;
}

} // namespace

SrOutput sr_ensemble_anneal(const Image& lr, const DictionaryPair& dict, const SrConfig& cfg,
                            Sampler& sampler) {
    return run_ensemble(lr, dict, cfg, sampler, false);
}

SrOutput sr_ensemble_point(const Image& lr, const DictionaryPair& dict, const SrConfig& cfg,
                           Sampler& sampler) {
    return run_ensemble(lr, dict, cfg, sampler, true);
}

void write_entropy_image(const SrOutput& out, const std::string& path) {
    if (!out.entropy_map) {
        throw ArgumentError("result carries no entropy map");
    }
    Image norm = *out.entropy_map;
    const double peak = *std::max_element(norm.data.begin(), norm.data.end());
    if (peak > 0.0) {
        for (auto& v : norm.data) v /= peak;
    }
    save_image(norm, path);
}

void write_entropy_csv(const SrOutput& out, const std::string& path) {
    std::ofstream f(path);
    if (!f) {
        throw IoError("cannot write entropy CSV: " + path);
    }
    f << "row,col,entropy\n";
    f.precision(17);
    for (const auto& e : out.entropy_table) {
        f << e.row << "," << e.col << "," << e.entropy << "\n";
    }
    if (!f) {
        throw IoError("entropy CSV write failed: " + path);
    }
}

} // namespace qsr
