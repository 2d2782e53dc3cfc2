// qsr command-line tool: dictionary training, super-resolution, PSNR
// benchmarking and synthetic sparse-coding sweeps, all through the C API.

#include <qsr.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CliError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void check(qsr_status status, const std::string& context) {
    if (status != QSR_OK) {
        throw CliError(context + ": " + qsr_status_name(status) + " (" + qsr_last_error() +
                       ")");
    }
}

struct ImageDeleter {
    void operator()(qsr_image* p) const { qsr_image_free(p); }
};
struct DictDeleter {
    void operator()(qsr_dict* p) const { qsr_dict_free(p); }
};
struct SamplerDeleter {
    void operator()(qsr_sampler* p) const { qsr_sampler_free(p); }
};
struct ResultDeleter {
    void operator()(qsr_sr_result* p) const { qsr_sr_result_free(p); }
};
struct SweepDeleter {
    void operator()(qsr_sweep* p) const { qsr_sweep_free(p); }
};
using ImagePtr = std::unique_ptr<qsr_image, ImageDeleter>;
using DictPtr = std::unique_ptr<qsr_dict, DictDeleter>;
using SamplerPtr = std::unique_ptr<qsr_sampler, SamplerDeleter>;
using ResultPtr = std::unique_ptr<qsr_sr_result, ResultDeleter>;
using SweepPtr = std::unique_ptr<qsr_sweep, SweepDeleter>;

ImagePtr load_image(const std::string& path) {
    qsr_image* raw = nullptr;
    check(qsr_image_load(path.c_str(), &raw), "loading " + path);
    return ImagePtr(raw);
}

std::string file_hash(const std::string& path) {
    char hex[65];
    check(qsr_hash_file(path.c_str(), hex), "hashing " + path);
    return hex;
}

std::vector<std::string> list_images(const std::string& dir) {
    std::vector<std::string> paths;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        std::string ext = entry.path().extension().string();
        std::transform(ext.begin(), ext.end(), ext.begin(),
                       [](unsigned char c) { return std::tolower(c); });
        if (ext == ".png" || ext == ".pgm" || ext == ".ppm") {
            paths.push_back(entry.path().string());
        }
    }
    std::sort(paths.begin(), paths.end());
    return paths;
}

void write_manifest(const std::string& path, const std::string& command, const json& config,
                    const std::vector<std::string>& inputs,
                    const std::vector<std::string>& outputs, const json& extra) {
    json m;
    m["command"] = command;
    m["tool_version"] = qsr_version();
    m["config"] = config;
    json in_hashes = json::object();
    for (const auto& p : inputs) {
        in_hashes[p] = file_hash(p);
    }
    m["inputs"] = in_hashes;
    m["outputs"] = outputs;
    for (auto it = extra.begin(); it != extra.end(); ++it) {
        m[it.key()] = it.value();
    }
    std::ofstream f(path);
    if (!f) {
        throw CliError("cannot write manifest: " + path);
    }
    f << m.dump(2) << "\n";
}

json timings_json(const qsr_timings& t) {
    return json{{"cpu_opt", t.cpu_opt},
                {"create_qubo", t.create_qubo},
                {"sampler_prep", t.sampler_prep},
                {"sampler_opt", t.sampler_opt},
                {"misc", t.misc}};
}

// shared options for commands that run the SR pipelines
struct SrOptions {
    std::string method = "lasso";
    std::string sampler = "anneal";
    std::string replay_file;
    std::string record_file;
    double lambda = 1e-5;
    double lambda_anneal = 0.1;
    double mu = 0.05;
    double beta = 1.0;
    bool beta_fixed = false;
    int reads = 100;
    int sweeps = 128;
    int backproject_iters = 100;
    int sub_size = 32;
    int batch_size = 512;
    int tabu_restarts = 8;
    std::uint64_t seed = 0;
    int threads = 0;

    void attach(CLI::App* cmd, bool with_method) {
        if (with_method) {
            cmd->add_option("--method", method, "pipeline: lasso | anneal | ensemble")
                ->check(CLI::IsMember({"lasso", "anneal", "ensemble"}));
        }
        cmd->add_option("--sampler", sampler, "QUBO backend: anneal | tabu | brute | replay")
            ->check(CLI::IsMember({"anneal", "tabu", "brute", "replay"}));
        cmd->add_option("--replay-file", replay_file, "replay file for --sampler replay");
        cmd->add_option("--record", record_file, "append every served sample set here");
        cmd->add_option("--lambda", lambda, "lasso sparsity weight");
        cmd->add_option("--lambda-anneal", lambda_anneal, "annealing sparsity weight");
        cmd->add_option("--mu", mu, "binary coefficient scale");
        cmd->add_option("--beta", beta, "fixed Boltzmann beta (implies --fixed-beta)")
            ->each([this](const std::string&) { beta_fixed = true; });
        cmd->add_flag("--fixed-beta", beta_fixed, "disable per-patch adaptive beta");
        cmd->add_option("--reads", reads, "reads per QUBO problem");
        cmd->add_option("--sweeps", sweeps, "annealer sweeps per read");
        cmd->add_option("--backproject-iters", backproject_iters, "backprojection iterations");
        cmd->add_option("--sub-size", sub_size, "clamped subproblem size");
        cmd->add_option("--batch-size", batch_size, "batched QUBO problem size");
        cmd->add_option("--tabu-restarts", tabu_restarts, "warm-start tabu restarts");
        cmd->add_option("--seed", seed, "RNG seed");
        cmd->add_option("--threads", threads, "worker threads (0 = logical cores)");
    }

    qsr_sr_config config() const {
        qsr_sr_config cfg;
        qsr_sr_config_init(&cfg);
        cfg.lambda_lasso = lambda;
        cfg.lambda_anneal = lambda_anneal;
        cfg.mu = mu;
        cfg.beta = beta;
        cfg.beta_adaptive = beta_fixed ? 0 : 1;
        cfg.n_reads = reads;
        cfg.backproject_iters = backproject_iters;
        cfg.seed = seed;
        if (threads > 0) cfg.threads = threads;
        cfg.sub_size = sub_size;
        cfg.batch_size = batch_size;
        cfg.tabu_restarts = tabu_restarts;
        return cfg;
    }

    SamplerPtr make_sampler() const {
        qsr_sampler* raw = nullptr;
        if (sampler == "anneal") {
            qsr_anneal_config cfg;
            qsr_anneal_config_init(&cfg);
            cfg.sweeps = sweeps;
            cfg.reads = reads;
            cfg.seed = seed;
            check(qsr_sampler_create_anneal(&cfg, &raw), "creating annealer");
        } else if (sampler == "tabu") {
            qsr_tabu_config cfg;
            qsr_tabu_config_init(&cfg);
            cfg.restarts = tabu_restarts;
            cfg.seed = seed;
            check(qsr_sampler_create_tabu(&cfg, &raw), "creating tabu sampler");
        } else if (sampler == "brute") {
            check(qsr_sampler_create_brute_force(&raw), "creating brute-force sampler");
        } else {
            if (replay_file.empty()) {
                throw CliError("--sampler replay requires --replay-file");
            }
            check(qsr_sampler_create_replay(replay_file.c_str(), &raw), "opening replay file");
        }
        SamplerPtr handle(raw);
        if (!record_file.empty()) {
            check(qsr_sampler_record_to(handle.get(), record_file.c_str()),
                  "enabling recording");
        }
        return handle;
    }

    json to_json() const {
        return json{{"method", method},
                    {"sampler", sampler},
                    {"replay_file", replay_file},
                    {"record_file", record_file},
                    {"lambda", lambda},
                    {"lambda_anneal", lambda_anneal},
                    {"mu", mu},
                    {"beta", beta},
                    {"beta_adaptive", !beta_fixed},
                    {"reads", reads},
                    {"sweeps", sweeps},
                    {"backproject_iters", backproject_iters},
                    {"sub_size", sub_size},
                    {"batch_size", batch_size},
                    {"tabu_restarts", tabu_restarts},
                    {"seed", seed},
                    {"threads", threads}};
    }
};

qsr_method method_id(const std::string& name) {
    if (name == "lasso") return QSR_METHOD_LASSO;
    if (name == "anneal") return QSR_METHOD_CLASSICAL_ANNEAL;
    return QSR_METHOD_ENSEMBLE_ANNEAL;
}

std::string default_manifest_path(const std::string& primary_output) {
    return primary_output + ".manifest.json";
}

std::string format_db(double v) {
    if (std::isinf(v)) return "inf";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

// ---- train-dict -----------------------------------------------------

struct TrainArgs {
    std::string corpus;
    std::string out;
    std::string manifest;
    int atoms = 128;
    int patches = 30000;
    int epochs = 20;
    double lambda = 5e-4;
    double variance_floor = 1e-4;
    int scale = 3;
    bool no_mean_removal = false;
    std::uint64_t seed = 0;
    int threads = 0;
};

int run_train(const TrainArgs& a) {
    const auto paths = list_images(a.corpus);
    if (paths.empty()) {
        throw CliError("corpus directory contains no images: " + a.corpus);
    }
    qsr_train_config cfg;
    qsr_train_config_init(&cfg);
    cfg.n_atoms = a.atoms;
    cfg.n_patches = a.patches;
    cfg.iterations = a.epochs;
    cfg.sparsity_lambda = a.lambda;
    cfg.variance_floor = a.variance_floor;
    cfg.scale = a.scale;
    cfg.mean_removed = a.no_mean_removal ? 0 : 1;
    cfg.seed = a.seed;
    if (a.threads > 0) cfg.threads = a.threads;

    std::vector<const char*> c_paths;
    c_paths.reserve(paths.size());
    for (const auto& p : paths) c_paths.push_back(p.c_str());

    qsr_dict* raw = nullptr;
    check(qsr_dict_train(c_paths.data(), c_paths.size(), &cfg, &raw), "training dictionary");
    DictPtr dict(raw);
    check(qsr_dict_save(dict.get(), a.out.c_str()), "saving dictionary");

    const json config{{"atoms", a.atoms},       {"patches", a.patches},
                      {"epochs", a.epochs},     {"lambda", a.lambda},
                      {"variance_floor", a.variance_floor},
                      {"scale", a.scale},       {"mean_removed", !a.no_mean_removal},
                      {"seed", a.seed},         {"threads", a.threads}};
    const std::string manifest = a.manifest.empty() ? default_manifest_path(a.out) : a.manifest;
    write_manifest(manifest, "train-dict", config, paths, {a.out},
                   json{{"seed", a.seed}});
    std::cout << "trained " << qsr_dict_n_atoms(dict.get()) << " atoms from " << paths.size()
              << " images -> " << a.out << "\n";
    return 0;
}

// ---- sr ---------------------------------------------------------------

struct SrArgs {
    std::string input;
    std::string dict;
    std::string out;
    std::string entropy_map;
    std::string entropy_csv;
    std::string manifest;
    SrOptions opts;
};

int run_sr(const SrArgs& a) {
    ImagePtr lr = load_image(a.input);
    qsr_dict* draw = nullptr;
    check(qsr_dict_load(a.dict.c_str(), &draw), "loading dictionary");
    DictPtr dict(draw);

    const qsr_sr_config cfg = a.opts.config();
    SamplerPtr sampler;
    qsr_sampler* sampler_raw = nullptr;
    if (a.opts.method != "lasso") {
        sampler = a.opts.make_sampler();
        sampler_raw = sampler.get();
    }
    qsr_sr_result* rraw = nullptr;
    check(qsr_sr_run(method_id(a.opts.method), lr.get(), dict.get(), &cfg, sampler_raw, &rraw),
          "running super-resolution");
    ResultPtr result(rraw);

    check(qsr_image_save(qsr_sr_result_image(result.get()), a.out.c_str()), "saving output");
    std::vector<std::string> outputs{a.out};
    if (!a.entropy_map.empty()) {
        if (!qsr_sr_result_entropy_map(result.get())) {
            throw CliError("--entropy-map needs --method ensemble");
        }
        check(qsr_sr_result_write_entropy_image(result.get(), a.entropy_map.c_str()),
              "saving entropy map");
        outputs.push_back(a.entropy_map);
    }
    if (!a.entropy_csv.empty()) {
        if (!qsr_sr_result_entropy_map(result.get())) {
            throw CliError("--entropy-csv needs --method ensemble");
        }
        check(qsr_sr_result_write_entropy_csv(result.get(), a.entropy_csv.c_str()),
              "saving entropy CSV");
        outputs.push_back(a.entropy_csv);
    }

    qsr_timings t{};
    check(qsr_sr_result_timings(result.get(), &t), "reading timings");
    std::vector<std::string> inputs{a.input, a.dict};
    if (!a.opts.replay_file.empty()) inputs.push_back(a.opts.replay_file);
    const std::string manifest = a.manifest.empty() ? default_manifest_path(a.out) : a.manifest;
    write_manifest(manifest, "sr", a.opts.to_json(), inputs, outputs,
                   json{{"seed", a.opts.seed}, {"timings_s", timings_json(t)}});
    std::cout << a.opts.method << ": " << a.input << " -> " << a.out << "\n";
    return 0;
}

// ---- bench ------------------------------------------------------------

struct BenchArgs {
    std::string hr_dir;
    std::string dict;
    std::string out;
    std::string manifest;
    std::string methods = "lasso,anneal,ensemble";
    SrOptions opts;
};

std::vector<std::string> split_list(const std::string& csv) {
    std::vector<std::string> out;
    std::string cur;
    for (const char c : csv) {
        if (c == ',') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

int run_bench(const BenchArgs& a) {
    const auto paths = list_images(a.hr_dir);
    if (paths.empty()) {
        throw CliError("benchmark directory contains no images: " + a.hr_dir);
    }
    const auto methods = split_list(a.methods);
    for (const auto& m : methods) {
        if (m != "lasso" && m != "anneal" && m != "ensemble") {
            throw CliError("unknown method in --methods: " + m);
        }
    }
    qsr_dict* draw = nullptr;
    check(qsr_dict_load(a.dict.c_str(), &draw), "loading dictionary");
    DictPtr dict(draw);
    const int scale = qsr_dict_scale(dict.get());
    const int min_dim = qsr_dict_patch_size_hr(dict.get());
    const qsr_sr_config cfg = a.opts.config();

    std::ofstream csv(a.out);
    if (!csv) {
        throw CliError("cannot write CSV: " + a.out);
    }
    csv << "image,bicubic";
    for (const auto& m : methods) csv << "," << m;
    csv << "\n";

    std::map<std::string, qsr_timings> phase_sums;
    std::vector<double> bicubic_sum;
    std::map<std::string, std::vector<double>> method_scores;
    std::vector<double> bicubic_scores;

    for (const auto& path : paths) {
        ImagePtr hr_full = load_image(path);
        const int w = (qsr_image_width(hr_full.get()) / scale) * scale;
        const int h = (qsr_image_height(hr_full.get()) / scale) * scale;
        if (w < min_dim || h < min_dim) {
            std::cerr << "skipping too-small image: " << path << "\n";
            continue;
        }
        qsr_image* raw = nullptr;
        check(qsr_image_crop(hr_full.get(), 0, 0, w, h, &raw), "cropping " + path);
        ImagePtr hr(raw);
        raw = nullptr;
        check(qsr_image_resample(hr.get(), w / scale, h / scale, 0, &raw), "downscaling");
        ImagePtr lr(raw);
        raw = nullptr;
        check(qsr_image_resample(lr.get(), w, h, 0, &raw), "bicubic upscale");
        ImagePtr bicubic(raw);

        double bicubic_db = 0.0;
        check(qsr_psnr_y(bicubic.get(), hr.get(), &bicubic_db), "psnr");
        bicubic_scores.push_back(bicubic_db);
        csv << fs::path(path).filename().string() << "," << format_db(bicubic_db);

        for (const auto& m : methods) {
            SamplerPtr sampler;
            qsr_sampler* sampler_raw = nullptr;
            if (m != "lasso") {
                sampler = a.opts.make_sampler();
                sampler_raw = sampler.get();
            }
            qsr_sr_result* rraw = nullptr;
            check(qsr_sr_run(method_id(m), lr.get(), dict.get(), &cfg, sampler_raw, &rraw),
                  "running " + m + " on " + path);
            ResultPtr result(rraw);
            double db = 0.0;
            check(qsr_psnr_y(qsr_sr_result_image(result.get()), hr.get(), &db), "psnr");
            method_scores[m].push_back(db);
            csv << "," << format_db(db);
            qsr_timings t{};
            check(qsr_sr_result_timings(result.get(), &t), "timings");
            auto& sum = phase_sums[m];
            sum.cpu_opt += t.cpu_opt;
            sum.create_qubo += t.create_qubo;
            sum.sampler_prep += t.sampler_prep;
            sum.sampler_opt += t.sampler_opt;
            sum.misc += t.misc;
        }
        csv << "\n";
    }
    if (bicubic_scores.empty()) {
        throw CliError("no usable images in: " + a.hr_dir);
    }

    auto mean = [](const std::vector<double>& v) {
        double s = 0.0;
        for (const double x : v) s += x;
        return s / static_cast<double>(v.size());
    };
    csv << "mean," << format_db(mean(bicubic_scores));
    for (const auto& m : methods) csv << "," << format_db(mean(method_scores[m]));
    csv << "\n";
    if (!csv) {
        throw CliError("CSV write failed: " + a.out);
    }
    csv.close();

    json timing_block = json::object();
    for (const auto& [m, t] : phase_sums) {
        timing_block[m] = timings_json(t);
    }
    json config = a.opts.to_json();
    config["methods"] = a.methods;
    std::vector<std::string> inputs = paths;
    inputs.push_back(a.dict);
    const std::string manifest = a.manifest.empty() ? default_manifest_path(a.out) : a.manifest;
    write_manifest(manifest, "bench", config, inputs, {a.out},
                   json{{"seed", a.opts.seed}, {"timings_s", timing_block}});
    std::cout << "bench: " << bicubic_scores.size() << " images -> " << a.out << "\n";
    return 0;
}

// ---- synth ------------------------------------------------------------

struct SynthArgs {
    std::string out;
    std::string svg;
    std::string manifest;
    std::string solvers = "lasso,anneal,ensemble";
    std::vector<double> grid;
    int datasets = 20;
    int reads = 50;
    int sweeps = 192;
    double mu = 0.05;
    std::uint64_t seed = 0;
    int threads = 0;
};

int run_synth(const SynthArgs& a) {
    const auto solver_names = split_list(a.solvers);
    std::vector<qsr_synth_solver> solvers;
    for (const auto& s : solver_names) {
        if (s == "lasso") {
            solvers.push_back(QSR_SYNTH_LASSO);
        } else if (s == "anneal") {
            solvers.push_back(QSR_SYNTH_CLASSICAL_ANNEAL);
        } else if (s == "ensemble") {
            solvers.push_back(QSR_SYNTH_ENSEMBLE_ANNEAL);
        } else {
            throw CliError("unknown solver in --solvers: " + s);
        }
    }
    qsr_synth_config cfg;
    qsr_synth_config_init(&cfg);
    cfg.n_datasets = a.datasets;
    cfg.seed = a.seed;
    cfg.mu = a.mu;
    cfg.reads = a.reads;
    cfg.sweeps = a.sweeps;
    if (a.threads > 0) cfg.threads = a.threads;

    std::vector<SweepPtr> sweeps;
    std::vector<const qsr_sweep*> views;
    for (const auto solver : solvers) {
        qsr_sweep* raw = nullptr;
        check(qsr_synth_sweep(solver, a.grid.empty() ? nullptr : a.grid.data(), a.grid.size(),
                              &cfg, &raw),
              "running sweep");
        sweeps.emplace_back(raw);
        views.push_back(raw);
    }
    check(qsr_sweep_write_csv(views.data(), views.size(), a.out.c_str()), "writing CSV");
    std::vector<std::string> outputs{a.out};
    if (!a.svg.empty()) {
        check(qsr_sweep_write_svg(views.data(), views.size(), a.svg.c_str()), "writing SVG");
        outputs.push_back(a.svg);
    }
    const json config{{"solvers", a.solvers}, {"grid", a.grid},   {"datasets", a.datasets},
                      {"reads", a.reads},     {"sweeps", a.sweeps}, {"mu", a.mu},
                      {"seed", a.seed},       {"threads", a.threads}};
    const std::string manifest = a.manifest.empty() ? default_manifest_path(a.out) : a.manifest;
    write_manifest(manifest, "synth", config, {}, outputs, json{{"seed", a.seed}});
    std::cout << "synth: " << solver_names.size() << " solver sweep(s) -> " << a.out << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"patch-wise binary sparse-coding super-resolution"};
    app.set_config("--config", "", "TOML-style config file; CLI flags take precedence");
    app.require_subcommand(1);

    TrainArgs train;
    auto* cmd_train = app.add_subcommand("train-dict", "train a coupled dictionary pair");
    cmd_train->add_option("--corpus", train.corpus, "directory of HR training images")
        ->required()
        ->check(CLI::ExistingDirectory);
    cmd_train->add_option("--out", train.out, "output dictionary file")->required();
    cmd_train->add_option("--atoms", train.atoms, "number of atoms");
    cmd_train->add_option("--patches", train.patches, "training patch pairs");
    cmd_train->add_option("--epochs", train.epochs, "training epochs");
    cmd_train->add_option("--lambda", train.lambda, "sparse-coding weight during training");
    cmd_train->add_option("--variance-floor", train.variance_floor,
                          "prune patches below this variance");
    cmd_train->add_option("--scale", train.scale, "magnification factor");
    cmd_train->add_flag("--no-mean-removal", train.no_mean_removal,
                        "keep patch means inside the HR atoms");
    cmd_train->add_option("--seed", train.seed, "RNG seed");
    cmd_train->add_option("--threads", train.threads, "worker threads (0 = logical cores)");
    cmd_train->add_option("--manifest", train.manifest, "manifest path");

    SrArgs sr;
    auto* cmd_sr = app.add_subcommand("sr", "super-resolve one image");
    cmd_sr->add_option("--in", sr.input, "LR input image")->required()->check(CLI::ExistingFile);
    cmd_sr->add_option("--dict", sr.dict, "dictionary file")
        ->required()
        ->check(CLI::ExistingFile);
    cmd_sr->add_option("--out", sr.out, "SR output image")->required();
    cmd_sr->add_option("--entropy-map", sr.entropy_map, "entropy map image (ensemble only)");
    cmd_sr->add_option("--entropy-csv", sr.entropy_csv, "per-patch entropy CSV");
    cmd_sr->add_option("--manifest", sr.manifest, "manifest path");
    sr.opts.attach(cmd_sr, true);

    BenchArgs bench;
    auto* cmd_bench = app.add_subcommand("bench", "PSNR benchmark over an HR image set");
    cmd_bench->add_option("--hr-dir", bench.hr_dir, "directory of HR ground-truth images")
        ->required()
        ->check(CLI::ExistingDirectory);
    cmd_bench->add_option("--dict", bench.dict, "dictionary file")
        ->required()
        ->check(CLI::ExistingFile);
    cmd_bench->add_option("--out", bench.out, "output CSV")->required();
    cmd_bench->add_option("--methods", bench.methods, "comma list: lasso,anneal,ensemble");
    cmd_bench->add_option("--manifest", bench.manifest, "manifest path");
    bench.opts.attach(cmd_bench, false);

    SynthArgs synth;
    auto* cmd_synth = app.add_subcommand("synth", "synthetic sparse-coding sweeps");
    cmd_synth->add_option("--out", synth.out, "output CSV")->required();
    cmd_synth->add_option("--svg", synth.svg, "optional SVG plot");
    cmd_synth->add_option("--solvers", synth.solvers, "comma list: lasso,anneal,ensemble");
    cmd_synth->add_option("--grid", synth.grid, "explicit knob grid values")
        ->delimiter(',');
    cmd_synth->add_option("--datasets", synth.datasets, "datasets per grid point");
    cmd_synth->add_option("--reads", synth.reads, "annealer reads");
    cmd_synth->add_option("--sweeps", synth.sweeps, "annealer sweeps");
    cmd_synth->add_option("--mu", synth.mu, "binary coefficient scale");
    cmd_synth->add_option("--seed", synth.seed, "RNG seed");
    cmd_synth->add_option("--threads", synth.threads, "worker threads (0 = logical cores)");
    cmd_synth->add_option("--manifest", synth.manifest, "manifest path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (cmd_train->parsed()) return run_train(train);
        if (cmd_sr->parsed()) return run_sr(sr);
        if (cmd_bench->parsed()) return run_bench(bench);
        if (cmd_synth->parsed()) return run_synth(synth);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
