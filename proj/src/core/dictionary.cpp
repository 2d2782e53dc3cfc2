#include "core/dictionary.hpp"

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>

#include <nlohmann/json.hpp>

#include "core/errors.hpp"
#include "core/features.hpp"
#include "core/parallel.hpp"
#include "core/resample.hpp"
#include "core/rng.hpp"
#include "core/solvers.hpp"

namespace qsr {

namespace {

struct Candidate {
    int image = 0;
    int row = 0;
    int col = 0;
};

double window_variance(const Image& y, int row, int col, int size) {
    double sum = 0.0;
    double sq = 0.0;
    for (int i = 0; i < size; ++i) {
        for (int j = 0; j < size; ++j) {
            const double v = y.at(row + i, col + j);
            sum += v;
            sq += v * v;
        }
    }
    const double n = static_cast<double>(size) * size;
    const double mean = sum / n;
    return sq / n - mean * mean;
}

double window_mean(const Image& y, int row, int col, int size) {
    double sum = 0.0;
    for (int i = 0; i < size; ++i) {
        for (int j = 0; j < size; ++j) {
            sum += y.at(row + i, col + j);
        }
    }
    return sum / (static_cast<double>(size) * size);
}

} // namespace

void sample_training_patches(const std::vector<Image>& corpus, const TrainConfig& cfg,
                             Eigen::MatrixXd& lr_features, Eigen::MatrixXd& hr_patches) {
    if (corpus.empty()) {
        throw ArgumentError("training corpus is empty");
    }
    if (cfg.n_patches < cfg.n_atoms) {
        throw ArgumentError("n_patches must be at least n_atoms");
    }
    const int p_hr = cfg.patch_size_hr;
    const int p_lr = cfg.patch_size_lr;
    const int m_l = 4 * p_lr * p_lr;
    const int m_h = p_hr * p_hr;

    struct PreparedImage {
        Image hr_y;
        Image up_y;
        Image feats;
    };
    std::vector<PreparedImage> prepared;
    std::vector<Candidate> candidates;
    for (std::size_t idx = 0; idx < corpus.size(); ++idx) {
        Image y = luma(corpus[idx]);
        const int w = (y.width / cfg.scale) * cfg.scale;
        const int h = (y.height / cfg.scale) * cfg.scale;
        if (w < p_hr || h < p_hr) {
            continue;
        }
        Image hr = crop(y, 0, 0, w, h);
        Image lr = resample(hr, w / cfg.scale, h / cfg.scale, ResampleKernel::bicubic());
        Image up = resample(lr, w, h, ResampleKernel::bicubic());
        Image feats = apply_filter_bank(up, gradient_filter_bank());

        const PatchGrid grid = make_patch_grid(w, h, p_hr, cfg.sample_stride);
        const int img_slot = static_cast<int>(prepared.size());
        for (const auto& [r, c] : grid.positions) {
            if (window_variance(hr, r, c, p_hr) >= cfg.variance_floor) {
                candidates.push_back({img_slot, r, c});
            }
        }
        prepared.push_back({std::move(hr), std::move(up), std::move(feats)});
    }
    if (static_cast<int>(candidates.size()) < cfg.n_patches) {
        throw DataError("corpus supplies too few patches after variance pruning: " +
                        std::to_string(candidates.size()) + " < " +
                        std::to_string(cfg.n_patches));
    }

    // partial Fisher-Yates for a deterministic uniform draw w/o replacement
    auto rng = make_rng(cfg.seed, 0xd1c7);
    for (int i = 0; i < cfg.n_patches; ++i) {
        const std::size_t j = i + uniform_below(rng, candidates.size() - i);
        std::swap(candidates[i], candidates[j]);
    }

    lr_features.resize(m_l, cfg.n_patches);
    hr_patches.resize(m_h, cfg.n_patches);
    for (int s = 0; s < cfg.n_patches; ++s) {
        const auto& cand = candidates[s];
        const auto& img = prepared[cand.image];
        lr_features.col(s) =
            extract_patch_vector(img.feats, cand.row, cand.col, p_lr, cfg.scale);
        Eigen::VectorXd hr_vec = extract_patch_vector(img.hr_y, cand.row, cand.col, p_hr);
        if (cfg.mean_removed) {
            hr_vec.array() -= window_mean(img.up_y, cand.row, cand.col, p_hr);
        }
        hr_patches.col(s) = hr_vec;
    }
}

namespace {

double lasso_objective(const Eigen::MatrixXd& d, const Eigen::VectorXd& x, double lambda) {
    const Eigen::VectorXd a = lasso_solve(d, x, lambda);
    return (d * a - x).squaredNorm() + lambda * a.lpNorm<1>();
}

} // namespace

DictionaryPair train_dictionary_pair(const Eigen::MatrixXd& lr_features,
                                     const Eigen::MatrixXd& hr_patches, const TrainConfig& cfg,
                                     TrainStats* stats) {
    if (lr_features.cols() != hr_patches.cols()) {
        throw DimensionError("feature and pixel sample counts differ");
    }
    const int n_samples = static_cast<int>(lr_features.cols());
    if (cfg.n_atoms > n_samples) {
        throw ArgumentError("more atoms than training samples");
    }
    const int m_l = static_cast<int>(lr_features.rows());
    const int m_h = static_cast<int>(hr_patches.rows());
    const int m = m_l + m_h;
    const int n_atoms = cfg.n_atoms;
    const double w_l = 1.0 / std::sqrt(static_cast<double>(m_l));
    const double w_h = 1.0 / std::sqrt(static_cast<double>(m_h));

    Eigen::MatrixXd x(m, n_samples);
    x.topRows(m_l) = w_l * lr_features;
    x.bottomRows(m_h) = w_h * hr_patches;
    for (int s = 0; s < n_samples; ++s) {
        if (x.col(s).norm() == 0.0) {
            throw DataError("degenerate training data: all-zero sample column");
        }
    }

    // hold out the tail 10% (post-shuffle order is caller-random already;
    // these samples never touch the dictionary updates)
    const int heldout = std::max(1, n_samples / 10);
    const int train_n = n_samples - heldout;
    if (cfg.n_atoms > train_n) {
        throw ArgumentError("more atoms than training samples after holdout");
    }
    const int heldout_eval = std::min(heldout, 500);

    auto rng = make_rng(cfg.seed, 0x7a31);

    // init atoms from distinct random training samples
    Eigen::MatrixXd dict(m, n_atoms);
    {
        std::vector<int> order(train_n);
        std::iota(order.begin(), order.end(), 0);
        for (int i = 0; i < n_atoms; ++i) {
            const std::size_t j = i + uniform_below(rng, order.size() - i);
            std::swap(order[i], order[j]);
            dict.col(i) = x.col(order[i]).normalized();
        }
    }

    Eigen::MatrixXd stat_a = Eigen::MatrixXd::Zero(n_atoms, n_atoms);
    Eigen::MatrixXd stat_b = Eigen::MatrixXd::Zero(m, n_atoms);
    Eigen::MatrixXd codes = Eigen::MatrixXd::Zero(n_atoms, n_samples); // warm starts
    std::vector<double> atom_usage(n_atoms, 0.0);
    std::vector<int> order(train_n);
    std::iota(order.begin(), order.end(), 0);
    if (stats) {
        stats->heldout_objective.clear();
        stats->reseeded_atoms = 0;
    }

    const int threads = std::max(1, cfg.threads);
    for (int epoch = 0; epoch < cfg.iterations; ++epoch) {
        // deterministic per-epoch shuffle
        for (int i = train_n - 1; i > 0; --i) {
            const std::size_t j = uniform_below(rng, static_cast<std::uint64_t>(i) + 1);
            std::swap(order[i], order[j]);
        }
        std::fill(atom_usage.begin(), atom_usage.end(), 0.0);

        for (int start = 0; start < train_n; start += cfg.minibatch) {
            const int count = std::min(cfg.minibatch, train_n - start);
            const Eigen::MatrixXd gram = dict.transpose() * dict;
            // sparse-code the minibatch in parallel; accumulation below is
            // sequential in sample order so results are thread-invariant
            parallel_for(static_cast<std::size_t>(count), threads, [&](std::size_t t) {
                const int s = order[start + static_cast<int>(t)];
                Eigen::VectorXd warm = codes.col(s);
                lasso_solve_gram(gram, dict.transpose() * x.col(s), cfg.sparsity_lambda, 1e-7,
                                 10000, &warm);
                codes.col(s) = warm;
            });
            for (int t = 0; t < count; ++t) {
                const int s = order[start + t];
                const auto& a = codes.col(s);
                stat_a.noalias() += a * a.transpose();
                stat_b.noalias() += x.col(s) * a.transpose();
                for (int j = 0; j < n_atoms; ++j) {
                    atom_usage[j] += std::fabs(a[j]);
                }
            }
            // block-coordinate atom update
            for (int j = 0; j < n_atoms; ++j) {
                const double ajj = stat_a(j, j);
                if (ajj < 1e-12) continue;
                Eigen::VectorXd u =
                    dict.col(j) + (stat_b.col(j) - dict * stat_a.col(j)) / ajj;
                const double norm = u.norm();
                dict.col(j) = u / std::max(1.0, norm);
            }
        }

        // reseed atoms that went unused for the whole epoch
        std::vector<int> dead;
        for (int j = 0; j < n_atoms; ++j) {
            if (atom_usage[j] == 0.0) dead.push_back(j);
        }
        if (!dead.empty()) {
            // worst-reconstructed samples under current codes
            std::vector<std::pair<double, int>> errs(train_n);
            parallel_for(static_cast<std::size_t>(train_n), threads, [&](std::size_t t) {
                const int s = order[t];
                errs[t] = {(x.col(s) - dict * codes.col(s)).squaredNorm(), s};
            });
            std::sort(errs.begin(), errs.end(), [](const auto& a, const auto& b) {
                if (a.first != b.first) return a.first > b.first;
                return a.second < b.second;
            });
            for (std::size_t k = 0; k < dead.size(); ++k) {
                const int j = dead[k];
                const int s = errs[k % errs.size()].second;
                dict.col(j) = x.col(s).normalized();
                stat_a.row(j).setZero();
                stat_a.col(j).setZero();
                stat_b.col(j).setZero();
                if (stats) ++stats->reseeded_atoms;
            }
        }

        if (stats) {
            double obj = 0.0;
            std::vector<double> objs(heldout_eval);
            parallel_for(static_cast<std::size_t>(heldout_eval), threads, [&](std::size_t t) {
                objs[t] = lasso_objective(dict, x.col(train_n + static_cast<int>(t)),
                                          cfg.sparsity_lambda);
            });
            for (const double o : objs) obj += o;
            stats->heldout_objective.push_back(obj / heldout_eval);
        }
    }

    for (int j = 0; j < n_atoms; ++j) {
        const double norm = dict.col(j).norm();
        if (norm == 0.0) {
            throw DataError("training collapsed: zero atom");
        }
        dict.col(j) /= norm;
    }

    DictionaryPair pair;
    pair.d_l = dict.topRows(m_l) / w_l;
    pair.d_h = dict.bottomRows(m_h) / w_h;
    pair.patch_size_lr = cfg.patch_size_lr;
    pair.patch_size_hr = cfg.patch_size_hr;
    pair.scale = cfg.scale;
    pair.mean_removed = cfg.mean_removed;
    return pair;
}

namespace {

constexpr char kMagic[4] = {'Q', 'S', 'R', 'D'};
constexpr std::uint16_t kVersion = 1;

void append_bytes(std::string& out, const void* p, std::size_t n) {
    out.append(static_cast<const char*>(p), n);
}

void append_matrix(std::string& out, const Eigen::MatrixXd& mat) {
    for (Eigen::Index r = 0; r < mat.rows(); ++r) {
        for (Eigen::Index c = 0; c < mat.cols(); ++c) {
            const double v = mat(r, c);
            std::uint64_t bits;
            std::memcpy(&bits, &v, 8);
            char buf[8];
            for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>(bits >> (8 * i));
            out.append(buf, 8);
        }
    }
}

} // namespace

void save_dictionary(const DictionaryPair& pair, const std::string& path) {
    nlohmann::json header;
    header["n_atoms"] = pair.n_atoms();
    header["m_l"] = pair.m_l();
    header["m_h"] = pair.m_h();
    header["patch_size_lr"] = pair.patch_size_lr;
    header["patch_size_hr"] = pair.patch_size_hr;
    header["scale"] = pair.scale;
    header["mean_removed"] = pair.mean_removed;
    const std::string header_text = header.dump();

    std::string blob;
    append_bytes(blob, kMagic, 4);
    const std::uint16_t ver = kVersion;
    char verbuf[2] = {static_cast<char>(ver & 0xff), static_cast<char>(ver >> 8)};
    append_bytes(blob, verbuf, 2);
    const std::uint32_t hlen = static_cast<std::uint32_t>(header_text.size());
    char lenbuf[4];
    for (int i = 0; i < 4; ++i) lenbuf[i] = static_cast<char>(hlen >> (8 * i));
    append_bytes(blob, lenbuf, 4);
    blob += header_text;
    append_matrix(blob, pair.d_l);
    append_matrix(blob, pair.d_h);

    const std::uint32_t crc = static_cast<std::uint32_t>(
        crc32(0L, reinterpret_cast<const Bytef*>(blob.data()), static_cast<uInt>(blob.size())));
    char crcbuf[4];
    for (int i = 0; i < 4; ++i) crcbuf[i] = static_cast<char>(crc >> (8 * i));
    append_bytes(blob, crcbuf, 4);

    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write dictionary file: " + path);
    }
    out.write(blob.data(), static_cast<std::streamsize>(blob.size()));
    if (!out) {
        throw IoError("dictionary write failed: " + path);
    }
}

DictionaryPair load_dictionary(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open dictionary file: " + path);
    }
    std::string blob((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (blob.size() < 10) {
        throw TruncatedError("dictionary file too short: " + path);
    }
    if (std::memcmp(blob.data(), kMagic, 4) != 0) {
        throw BadMagicError("not a dictionary file (bad magic): " + path);
    }
    const std::uint16_t ver = static_cast<std::uint8_t>(blob[4]) |
                              (static_cast<std::uint16_t>(static_cast<std::uint8_t>(blob[5])) << 8);
    if (ver != kVersion) {
        throw VersionError("unsupported dictionary version " + std::to_string(ver));
    }
    std::uint32_t hlen = 0;
    for (int i = 0; i < 4; ++i) {
        hlen |= static_cast<std::uint32_t>(static_cast<std::uint8_t>(blob[6 + i])) << (8 * i);
    }
    std::size_t pos = 10;
    if (blob.size() < pos + hlen) {
        throw TruncatedError("dictionary header truncated: " + path);
    }
    nlohmann::json header;
    try {
        header = nlohmann::json::parse(blob.substr(pos, hlen));
    } catch (const nlohmann::json::exception& e) {
        throw CorruptError(std::string("bad dictionary header: ") + e.what());
    }
    pos += hlen;

    DictionaryPair pair;
    int n_atoms, m_l, m_h;
    try {
        n_atoms = header.at("n_atoms").get<int>();
        m_l = header.at("m_l").get<int>();
        m_h = header.at("m_h").get<int>();
        pair.patch_size_lr = header.at("patch_size_lr").get<int>();
        pair.patch_size_hr = header.at("patch_size_hr").get<int>();
        pair.scale = header.at("scale").get<int>();
        pair.mean_removed = header.at("mean_removed").get<bool>();
    } catch (const nlohmann::json::exception& e) {
        throw CorruptError(std::string("bad dictionary header: ") + e.what());
    }
    if (n_atoms < 1 || m_l < 1 || m_h < 1) {
        throw CorruptError("bad dictionary shape in header");
    }

    const std::size_t payload =
        8 * (static_cast<std::size_t>(m_l) + m_h) * static_cast<std::size_t>(n_atoms);
    if (blob.size() != pos + payload + 4) {
        throw TruncatedError("dictionary payload truncated: " + path);
    }
    const std::uint32_t expected = static_cast<std::uint32_t>(crc32(
        0L, reinterpret_cast<const Bytef*>(blob.data()), static_cast<uInt>(blob.size() - 4)));
    std::uint32_t stored = 0;
    for (int i = 0; i < 4; ++i) {
        stored |= static_cast<std::uint32_t>(static_cast<std::uint8_t>(blob[blob.size() - 4 + i]))
                  << (8 * i);
    }
    if (stored != expected) {
        throw CorruptError("dictionary checksum mismatch: " + path);
    }

    auto read_matrix = [&](int rows, int cols) {
        Eigen::MatrixXd mat(rows, cols);
        for (int r = 0; r < rows; ++r) {
            for (int c = 0; c < cols; ++c) {
                std::uint64_t bits = 0;
                for (int i = 0; i < 8; ++i) {
                    bits |= static_cast<std::uint64_t>(static_cast<std::uint8_t>(blob[pos + i]))
                            << (8 * i);
                }
                pos += 8;
                double v;
                std::memcpy(&v, &bits, 8);
                mat(r, c) = v;
            }
        }
        return mat;
    };
    pair.d_l = read_matrix(m_l, n_atoms);
    pair.d_h = read_matrix(m_h, n_atoms);
    if (!pair.d_l.allFinite() || !pair.d_h.allFinite()) {
        throw CorruptError("dictionary contains non-finite entries: " + path);
    }
    return pair;
}

} // namespace qsr
