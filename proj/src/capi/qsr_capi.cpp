#include "qsr.h"

#include <cstring>
#include <string>
#include <vector>

#include "core/dictionary.hpp"
#include "core/errors.hpp"
#include "core/image.hpp"
#include "core/image_io.hpp"
#include "core/parallel.hpp"
#include "core/resample.hpp"
#include "core/sha256.hpp"
#include "core/solvers.hpp"
#include "core/sr.hpp"
#include "core/synth.hpp"

struct qsr_image {
    qsr::Image v;
};
struct qsr_dict {
    qsr::DictionaryPair v;
};
struct qsr_sampler {
    std::unique_ptr<qsr::Sampler> v;
};
struct qsr_sr_result {
    qsr::SrOutput v;
    qsr_image image_view;
    qsr_image entropy_view;
    bool has_entropy = false;
};
struct qsr_sweep {
    qsr::SweepResult v;
};

namespace {

thread_local std::string g_last_error;

qsr_status fail(qsr_status code, const char* what) {
    g_last_error = what ? what : "";
    return code;
}

qsr_status translate(const std::exception& e) {
    if (const auto* err = dynamic_cast<const qsr::Error*>(&e)) {
        return fail(static_cast<qsr_status>(static_cast<int>(err->code())), e.what());
    }
    return fail(QSR_ERROR_INTERNAL, e.what());
}

template <typename Fn>
qsr_status guarded(Fn&& fn) {
    try {
        fn();
        g_last_error.clear();
        return QSR_OK;
    } catch (const std::exception& e) {
        return translate(e);
    } catch (...) {
        return fail(QSR_ERROR_INTERNAL, "unknown error");
    }
}

qsr_status require(bool ok, const char* what) {
    return ok ? QSR_OK : fail(QSR_ERROR_ARGUMENT, what);
}

} // namespace

extern "C" {

const char* qsr_version(void) {
    return "0.1.0";
}

const char* qsr_status_name(qsr_status status) {
    switch (status) {
        case QSR_OK: return "ok";
        case QSR_ERROR_IO: return "io";
        case QSR_ERROR_FORMAT: return "format";
        case QSR_ERROR_CORRUPT: return "corrupt";
        case QSR_ERROR_DIMENSION: return "dimension";
        case QSR_ERROR_ARGUMENT: return "argument";
        case QSR_ERROR_BAD_MAGIC: return "bad_magic";
        case QSR_ERROR_TRUNCATED: return "truncated";
        case QSR_ERROR_VERSION: return "version";
        case QSR_ERROR_NOT_RECORDED: return "not_recorded";
        case QSR_ERROR_DATA: return "data";
        case QSR_ERROR_INTERNAL: return "internal";
    }
    return "unknown";
}

const char* qsr_last_error(void) {
    return g_last_error.c_str();
}

qsr_status qsr_hash_file(const char* path, char* out_hex65) {
    if (qsr_status s = require(path && out_hex65, "null argument"); s != QSR_OK) return s;
    return guarded([&] {
        const std::string hex = qsr::sha256_file_hex(path);
        std::memcpy(out_hex65, hex.c_str(), 65);
    });
}

/* ---- images ------------------------------------------------------- */

qsr_status qsr_image_load(const char* path, qsr_image** out) {
    if (qsr_status s = require(path && out, "null argument"); s != QSR_OK) return s;
    return guarded([&] { *out = new qsr_image{qsr::load_image(path)}; });
}

qsr_status qsr_image_save(const qsr_image* img, const char* path) {
    if (qsr_status s = require(img && path, "null argument"); s != QSR_OK) return s;
    return guarded([&] { qsr::save_image(img->v, path); });
}

qsr_status qsr_image_create(int32_t width, int32_t height, int32_t channels,
                            const double* data, qsr_image** out) {
    if (qsr_status s = require(data && out, "null argument"); s != QSR_OK) return s;
    return guarded([&] {
        qsr::Image img(width, height, channels);
        std::memcpy(img.data.data(), data, img.data.size() * sizeof(double));
        *out = new qsr_image{std::move(img)};
    });
}

int32_t qsr_image_width(const qsr_image* img) {
    return img ? img->v.width : 0;
}
int32_t qsr_image_height(const qsr_image* img) {
    return img ? img->v.height : 0;
}
int32_t qsr_image_channels(const qsr_image* img) {
    return img ? img->v.channels : 0;
}

qsr_status qsr_image_read(const qsr_image* img, double* buffer, size_t buffer_len) {
    if (qsr_status s = require(img && buffer, "null argument"); s != QSR_OK) return s;
    if (buffer_len < img->v.data.size()) {
        return fail(QSR_ERROR_ARGUMENT, "buffer too small");
    }
    std::memcpy(buffer, img->v.data.data(), img->v.data.size() * sizeof(double));
    return QSR_OK;
}

qsr_status qsr_image_resample(const qsr_image* img, int32_t out_w, int32_t out_h,
                              int32_t kernel, qsr_image** out) {
    if (qsr_status s = require(img && out, "null argument"); s != QSR_OK) return s;
    return guarded([&] {
        const qsr::ResampleKernel k =
            kernel == 1 ? qsr::ResampleKernel::box() : qsr::ResampleKernel::bicubic();
        *out = new qsr_image{qsr::resample(img->v, out_w, out_h, k)};
    });
}

qsr_status qsr_image_crop(const qsr_image* img, int32_t row0, int32_t col0, int32_t width,
                          int32_t height, qsr_image** out) {
    if (qsr_status s = require(img && out, "null argument"); s != QSR_OK) return s;
    return guarded([&] { *out = new qsr_image{qsr::crop(img->v, row0, col0, width, height)}; });
}

qsr_status qsr_psnr_y(const qsr_image* pred, const qsr_image* gt, double* out_db) {
    if (qsr_status s = require(pred && gt && out_db, "null argument"); s != QSR_OK) return s;
    return guarded([&] { *out_db = qsr::psnr_y(pred->v, gt->v); });
}

void qsr_image_free(qsr_image* img) {
    delete img;
}

/* ---- dictionaries -------------------------------------------------- */

void qsr_train_config_init(qsr_train_config* cfg) {
    if (!cfg) return;
    *cfg = {};
    cfg->n_atoms = 128;
    cfg->n_patches = 30000;
    cfg->variance_floor = 1e-4;
    cfg->iterations = 20;
    cfg->sparsity_lambda = 5e-4;
    cfg->seed = 0;
    cfg->scale = 3;
    cfg->patch_size_hr = 9;
    cfg->patch_size_lr = 3;
    cfg->mean_removed = 1;
    cfg->threads = qsr::default_threads();
}

namespace {

qsr::TrainConfig to_train_config(const qsr_train_config& c) {
    qsr::TrainConfig cfg;
    cfg.n_atoms = c.n_atoms;
    cfg.n_patches = c.n_patches;
    cfg.variance_floor = c.variance_floor;
    cfg.iterations = c.iterations;
    cfg.sparsity_lambda = c.sparsity_lambda;
    cfg.seed = c.seed;
    cfg.scale = c.scale;
    cfg.patch_size_hr = c.patch_size_hr;
    cfg.patch_size_lr = c.patch_size_lr;
    cfg.mean_removed = c.mean_removed != 0;
    cfg.threads = c.threads;
    return cfg;
}

} // namespace

qsr_status qsr_dict_train(const char* const* image_paths, size_t n_paths,
                          const qsr_train_config* cfg, qsr_dict** out) {
    if (qsr_status s = require(image_paths && cfg && out && n_paths > 0, "null argument");
        s != QSR_OK)
        return s;
    return guarded([&] {
        std::vector<qsr::Image> corpus;
        corpus.reserve(n_paths);
        for (size_t i = 0; i < n_paths; ++i) {
            corpus.push_back(qsr::load_image(image_paths[i]));
        }
        const qsr::TrainConfig core_cfg = to_train_config(*cfg);
        Eigen::MatrixXd feats, patches;
        qsr::sample_training_patches(corpus, core_cfg, feats, patches);
        *out = new qsr_dict{qsr::train_dictionary_pair(feats, patches, core_cfg)};
    });
}

qsr_status qsr_dict_load(const char* path, qsr_dict** out) {
    if (qsr_status s = require(path && out, "null argument"); s != QSR_OK) return s;
    return guarded([&] { *out = new qsr_dict{qsr::load_dictionary(path)}; });
}

qsr_status qsr_dict_save(const qsr_dict* dict, const char* path) {
    if (qsr_status s = require(dict && path, "null argument"); s != QSR_OK) return s;
    return guarded([&] { qsr::save_dictionary(dict->v, path); });
}

int32_t qsr_dict_n_atoms(const qsr_dict* dict) {
    return dict ? dict->v.n_atoms() : 0;
}
int32_t qsr_dict_scale(const qsr_dict* dict) {
    return dict ? dict->v.scale : 0;
}
int32_t qsr_dict_patch_size_hr(const qsr_dict* dict) {
    return dict ? dict->v.patch_size_hr : 0;
}
int32_t qsr_dict_patch_size_lr(const qsr_dict* dict) {
    return dict ? dict->v.patch_size_lr : 0;
}
int32_t qsr_dict_mean_removed(const qsr_dict* dict) {
    return dict ? (dict->v.mean_removed ? 1 : 0) : 0;
}

void qsr_dict_free(qsr_dict* dict) {
    delete dict;
}

/* ---- samplers ------------------------------------------------------ */

void qsr_anneal_config_init(qsr_anneal_config* cfg) {
    if (!cfg) return;
    *cfg = {};
    cfg->sweeps = 128;
    cfg->reads = 100;
    cfg->beta_start = 0.1;
    cfg->beta_end = 10.0;
    cfg->geometric = 1;
    cfg->seed = 0;
}

void qsr_tabu_config_init(qsr_tabu_config* cfg) {
    if (!cfg) return;
    *cfg = {};
    cfg->restarts = 8;
    cfg->tenure = 0;
    cfg->max_iters = 0;
    cfg->seed = 0;
}

qsr_status qsr_sampler_create_anneal(const qsr_anneal_config* cfg, qsr_sampler** out) {
    if (qsr_status s = require(cfg && out, "null argument"); s != QSR_OK) return s;
    return guarded([&] {
        qsr::AnnealConfig core;
        core.sweeps = cfg->sweeps;
        core.reads = cfg->reads;
        core.beta_start = cfg->beta_start;
        core.beta_end = cfg->beta_end;
        core.geometric = cfg->geometric != 0;
        core.seed = cfg->seed;
        *out = new qsr_sampler{qsr::make_simulated_annealer(core)};
    });
}

qsr_status qsr_sampler_create_tabu(const qsr_tabu_config* cfg, qsr_sampler** out) {
    if (qsr_status s = require(cfg && out, "null argument"); s != QSR_OK) return s;
    return guarded([&] {
        qsr::TabuConfig core;
        core.restarts = cfg->restarts;
        core.tenure = cfg->tenure;
        core.max_iters = cfg->max_iters;
        core.seed = cfg->seed;
        *out = new qsr_sampler{qsr::make_tabu_sampler(core)};
    });
}

qsr_status qsr_sampler_create_brute_force(qsr_sampler** out) {
    if (qsr_status s = require(out != nullptr, "null argument"); s != QSR_OK) return s;
    return guarded([&] { *out = new qsr_sampler{qsr::make_brute_force_sampler()}; });
}

qsr_status qsr_sampler_create_replay(const char* path, qsr_sampler** out) {
    if (qsr_status s = require(path && out, "null argument"); s != QSR_OK) return s;
    return guarded([&] { *out = new qsr_sampler{qsr::make_replay_sampler(path)}; });
}

qsr_status qsr_sampler_record_to(qsr_sampler* sampler, const char* path) {
    if (qsr_status s = require(sampler && path, "null argument"); s != QSR_OK) return s;
    sampler->v->set_record_path(path);
    return QSR_OK;
}

void qsr_sampler_free(qsr_sampler* sampler) {
    delete sampler;
}

/* ---- super-resolution ---------------------------------------------- */

void qsr_sr_config_init(qsr_sr_config* cfg) {
    if (!cfg) return;
    *cfg = {};
    cfg->scale = 3;
    cfg->lambda_lasso = 1e-5;
    cfg->lambda_anneal = 0.1;
    cfg->mu = 0.05;
    cfg->beta = 1.0;
    cfg->beta_adaptive = 1;
    cfg->n_reads = 100;
    cfg->backproject_iters = 100;
    cfg->seed = 0;
    cfg->threads = qsr::default_threads();
    cfg->sub_size = 32;
    cfg->batch_size = 512;
    cfg->tabu_restarts = 8;
}

namespace {

qsr::SrConfig to_sr_config(const qsr_sr_config& c) {
    qsr::SrConfig cfg;
    cfg.scale = c.scale;
    cfg.lambda_lasso = c.lambda_lasso;
    cfg.lambda_anneal = c.lambda_anneal;
    cfg.mu = c.mu;
    cfg.beta = c.beta;
    cfg.beta_adaptive = c.beta_adaptive != 0;
    cfg.n_reads = c.n_reads;
    cfg.backproject_iters = c.backproject_iters;
    cfg.seed = c.seed;
    cfg.threads = c.threads;
    cfg.sub_size = c.sub_size;
    cfg.batch_size = c.batch_size;
    cfg.tabu.restarts = c.tabu_restarts;
    cfg.tabu.seed = c.seed;
    return cfg;
}

} // namespace

qsr_status qsr_sr_run(qsr_method method, const qsr_image* lr, const qsr_dict* dict,
                      const qsr_sr_config* cfg, qsr_sampler* sampler, qsr_sr_result** out) {
    if (qsr_status s = require(lr && dict && cfg && out, "null argument"); s != QSR_OK)
        return s;
    if (method != QSR_METHOD_LASSO && !sampler) {
        return fail(QSR_ERROR_ARGUMENT, "annealing methods require a sampler");
    }
    return guarded([&] {
        const qsr::SrConfig core_cfg = to_sr_config(*cfg);
        auto run = [&]() -> qsr::SrOutput {
            switch (method) {
                case QSR_METHOD_LASSO:
                    return qsr::sr_lasso(lr->v, dict->v, core_cfg);
                case QSR_METHOD_CLASSICAL_ANNEAL:
                    return qsr::sr_classical_anneal(lr->v, dict->v, core_cfg, *sampler->v);
                case QSR_METHOD_ENSEMBLE_ANNEAL:
                    return qsr::sr_ensemble_anneal(lr->v, dict->v, core_cfg, *sampler->v);
            }
            throw qsr::ArgumentError("unknown method");
        };
        auto* wrapped = new qsr_sr_result;
        wrapped->v = run();
        wrapped->image_view.v = wrapped->v.image;
        if (wrapped->v.entropy_map) {
            wrapped->entropy_view.v = *wrapped->v.entropy_map;
            wrapped->has_entropy = true;
        }
        *out = wrapped;
    });
}

const qsr_image* qsr_sr_result_image(const qsr_sr_result* result) {
    return result ? &result->image_view : nullptr;
}

const qsr_image* qsr_sr_result_entropy_map(const qsr_sr_result* result) {
    return (result && result->has_entropy) ? &result->entropy_view : nullptr;
}

qsr_status qsr_sr_result_timings(const qsr_sr_result* result, qsr_timings* out) {
    if (qsr_status s = require(result && out, "null argument"); s != QSR_OK) return s;
    out->cpu_opt = result->v.timings.cpu_opt;
    out->create_qubo = result->v.timings.create_qubo;
    out->sampler_prep = result->v.timings.sampler_prep;
    out->sampler_opt = result->v.timings.sampler_opt;
    out->misc = result->v.timings.misc;
    return QSR_OK;
}

qsr_status qsr_sr_result_write_entropy_csv(const qsr_sr_result* result, const char* path) {
    if (qsr_status s = require(result && path, "null argument"); s != QSR_OK) return s;
    return guarded([&] { qsr::write_entropy_csv(result->v, path); });
}

qsr_status qsr_sr_result_write_entropy_image(const qsr_sr_result* result, const char* path) {
    if (qsr_status s = require(result && path, "null argument"); s != QSR_OK) return s;
    return guarded([&] { qsr::write_entropy_image(result->v, path); });
}

void qsr_sr_result_free(qsr_sr_result* result) {
    delete result;
}

/* ---- synthetic sweeps ----------------------------------------------- */

void qsr_synth_config_init(qsr_synth_config* cfg) {
    if (!cfg) return;
    *cfg = {};
    cfg->n_datasets = 20;
    cfg->seed = 0;
    cfg->mu = 0.05;
    cfg->reads = 50;
    cfg->sweeps = 192;
    cfg->threads = qsr::default_threads();
}

qsr_status qsr_synth_sweep(qsr_synth_solver solver, const double* grid, size_t n_grid,
                           const qsr_synth_config* cfg, qsr_sweep** out) {
    if (qsr_status s = require(cfg && out, "null argument"); s != QSR_OK) return s;
    return guarded([&] {
        const auto core_solver = static_cast<qsr::SynthSolver>(solver);
        std::vector<double> values;
        if (grid && n_grid > 0) {
            values.assign(grid, grid + n_grid);
        } else {
            values = qsr::default_sweep_grid(core_solver);
        }
        qsr::SynthConfig core;
        core.n_datasets = cfg->n_datasets;
        core.seed = cfg->seed;
        core.mu = cfg->mu;
        core.reads = cfg->reads;
        core.sweeps = cfg->sweeps;
        core.threads = cfg->threads;
        *out = new qsr_sweep{qsr::run_sweep(core_solver, values, core)};
    });
}

size_t qsr_sweep_size(const qsr_sweep* sweep) {
    return sweep ? sweep->v.points.size() : 0;
}

qsr_status qsr_sweep_point_at(const qsr_sweep* sweep, size_t i, qsr_sweep_point* out) {
    if (qsr_status s = require(sweep && out, "null argument"); s != QSR_OK) return s;
    if (i >= sweep->v.points.size()) {
        return fail(QSR_ERROR_ARGUMENT, "sweep point index out of range");
    }
    const auto& p = sweep->v.points[i];
    out->knob = p.knob;
    out->mean_train_err = p.mean_train_err;
    out->std_train_err = p.std_train_err;
    out->mean_val_err = p.mean_val_err;
    out->std_val_err = p.std_val_err;
    out->mean_l0 = p.mean_l0;
    out->std_l0 = p.std_l0;
    return QSR_OK;
}

namespace {

std::vector<qsr::SweepResult> collect(const qsr_sweep* const* sweeps, size_t n) {
    std::vector<qsr::SweepResult> list;
    list.reserve(n);
    for (size_t i = 0; i < n; ++i) {
        list.push_back(sweeps[i]->v);
    }
    return list;
}

} // namespace

qsr_status qsr_sweep_write_csv(const qsr_sweep* const* sweeps, size_t n_sweeps,
                               const char* path) {
    if (qsr_status s = require(sweeps && path && n_sweeps > 0, "null argument"); s != QSR_OK)
        return s;
    return guarded([&] { qsr::write_sweep_csv(collect(sweeps, n_sweeps), path); });
}

qsr_status qsr_sweep_write_svg(const qsr_sweep* const* sweeps, size_t n_sweeps,
                               const char* path) {
    if (qsr_status s = require(sweeps && path && n_sweeps > 0, "null argument"); s != QSR_OK)
        return s;
    return guarded([&] { qsr::write_sweep_svg(collect(sweeps, n_sweeps), path); });
}

void qsr_sweep_free(qsr_sweep* sweep) {
    delete sweep;
}

} /* extern "C" */
