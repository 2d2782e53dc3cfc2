#include "core/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>

#include <nlohmann/json.hpp>

#include "core/errors.hpp"
#include "core/parallel.hpp"
#include "core/rng.hpp"

namespace qsr {

Eigen::VectorXd lasso_solve(const Eigen::MatrixXd& d, const Eigen::VectorXd& y, double lambda,
                            double tol, int max_passes) {
    if (d.rows() != y.size()) {
        throw DimensionError("lasso: dictionary rows must match signal length");
    }
    if (!d.allFinite() || !y.allFinite() || !std::isfinite(lambda) || lambda < 0.0) {
        throw ArgumentError("lasso: inputs must be finite and lambda >= 0");
    }
    return lasso_solve_gram(d.transpose() * d, d.transpose() * y, lambda, tol, max_passes);
}

Eigen::VectorXd lasso_solve_gram(const Eigen::MatrixXd& gram, const Eigen::VectorXd& dty,
                                 double lambda, double tol, int max_passes,
                                 Eigen::VectorXd* warm) {
    const Eigen::Index n = dty.size();
    Eigen::VectorXd alpha = (warm && warm->size() == n) ? *warm : Eigen::VectorXd::Zero(n);
    // residual correlations: c = D^T y - G alpha
    Eigen::VectorXd corr = dty - gram * alpha;
    const double thresh = lambda / 2.0;
    for (int pass = 0; pass < max_passes; ++pass) {
        double max_change = 0.0;
        for (Eigen::Index j = 0; j < n; ++j) {
            const double gjj = gram(j, j);
            if (gjj <= 0.0) {
                continue; // zero atom; leave its coefficient alone
            }
            const double old = alpha[j];
            const double rho = corr[j] + gjj * old;
            double next = 0.0;
            if (rho > thresh) {
                next = (rho - thresh) / gjj;
            } else if (rho < -thresh) {
                next = (rho + thresh) / gjj;
            }
            const double delta = next - old;
            if (delta != 0.0) {
                corr -= delta * gram.col(j);
                alpha[j] = next;
            }
            max_change = std::max(max_change, std::fabs(delta));
        }
        if (max_change < tol) {
            break;
        }
    }
    if (warm) {
        *warm = alpha;
    }
    return alpha;
}

namespace {

// Incrementally maintained flip deltas. field[i] is the energy change of
// flipping variable i from the current assignment.
struct FlipState {
    const QuboProblem* p = nullptr;
    std::vector<std::uint8_t> z;
    std::vector<double> field;
    // couplings precomputed per variable; skips zero entries so that
    // block-diagonal batch problems cost what their blocks cost
    std::vector<std::vector<std::pair<int, double>>> adj;

    explicit FlipState(const QuboProblem& prob) : p(&prob) {
        const int n = prob.size();
        adj.resize(n);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                if (j != i && prob.q(j, i) != 0.0) {
                    adj[i].emplace_back(j, prob.q(j, i));
                }
            }
        }
    }

    void reset(std::vector<std::uint8_t> z0) {
        z = std::move(z0);
        const int n = p->size();
        field.assign(n, 0.0);
        for (int i = 0; i < n; ++i) {
            double coupling = 0.0;
            for (const auto& [j, w] : adj[i]) {
                if (z[j]) coupling += w;
            }
            const double sign = z[i] ? -1.0 : 1.0;
            field[i] = sign * (p->b[i] + p->q(i, i) + 2.0 * coupling);
        }
    }

    void flip(int i) {
        const double delta_sign = z[i] ? -2.0 : 2.0; // change of 2*z_i - 1... sign for neighbors
        z[i] ^= 1;
        field[i] = -field[i];
        for (const auto& [j, w] : adj[i]) {
            const double flip_sign = z[j] ? -1.0 : 1.0;
            field[j] += flip_sign * delta_sign * w;
        }
    }
};

std::vector<std::uint8_t> random_assignment(std::mt19937_64& rng, int n) {
    std::vector<std::uint8_t> z(n);
    for (int i = 0; i < n; ++i) {
        z[i] = (rng() >> 62) & 1;
    }
    return z;
}

class SimulatedAnnealer final : public Sampler {
public:
    explicit SimulatedAnnealer(const AnnealConfig& cfg) : cfg_(cfg) {
        if (cfg.sweeps < 1 || cfg.reads < 1) {
            throw ArgumentError("annealer needs sweeps >= 1 and reads >= 1");
        }
        if (!(cfg.beta_start > 0.0) || cfg.beta_end < cfg.beta_start) {
            throw ArgumentError("annealer needs 0 < beta_start <= beta_end");
        }
    }

protected:
    SampleSet do_sample(const QuboProblem& p, int reads) override {
        const int n = p.size();
        std::vector<double> betas(static_cast<std::size_t>(cfg_.sweeps));
        for (int s = 0; s < cfg_.sweeps; ++s) {
            const double t = cfg_.sweeps == 1 ? 1.0 : static_cast<double>(s) / (cfg_.sweeps - 1);
            betas[s] = cfg_.geometric
                           ? cfg_.beta_start * std::pow(cfg_.beta_end / cfg_.beta_start, t)
                           : cfg_.beta_start + t * (cfg_.beta_end - cfg_.beta_start);
        }
        std::vector<std::vector<std::uint8_t>> finals(reads);
        parallel_for(static_cast<std::size_t>(reads), threads(), [&](std::size_t r) {
            auto rng = make_rng(cfg_.seed, r);
            FlipState state(p);
            state.reset(random_assignment(rng, n));
            for (const double beta : betas) {
                for (int i = 0; i < n; ++i) {
                    const double d = state.field[i];
                    if (d <= 0.0 || uniform01(rng) < std::exp(-beta * d)) {
                        state.flip(i);
                    }
                }
            }
            finals[r] = std::move(state.z);
        });
        return SampleSet::from_reads(p, finals);
    }

private:
    AnnealConfig cfg_;
};

class TabuSampler final : public Sampler {
public:
    explicit TabuSampler(const TabuConfig& cfg) : cfg_(cfg) {}

protected:
    SampleSet do_sample(const QuboProblem& p, int reads) override {
        // reads are taken as independent restart groups; each read returns
        // the best assignment of its group
        std::vector<std::vector<std::uint8_t>> bests(reads);
        parallel_for(static_cast<std::size_t>(reads), threads(), [&](std::size_t r) {
            TabuConfig local = cfg_;
            local.seed = derive_seed(cfg_.seed, r);
            bests[r] = tabu_search(p, local);
        });
        return SampleSet::from_reads(p, bests);
    }

private:
    TabuConfig cfg_;
};

class BruteForceSampler final : public Sampler {
protected:
    SampleSet do_sample(const QuboProblem& p, int reads) override {
        const int n = p.size();
        if (n > 24) {
            throw ArgumentError("brute force refuses problems with more than 24 variables");
        }
        // Gray-code walk: exactly one flip between consecutive states.
        FlipState state(p);
        state.reset(std::vector<std::uint8_t>(n, 0));
        double e = 0.0;
        double best_e = 0.0;
        std::vector<std::uint8_t> best = state.z;
        const std::uint64_t count = 1ULL << n;
        std::uint64_t gray = 0;
        for (std::uint64_t k = 1; k < count; ++k) {
            const std::uint64_t next_gray = k ^ (k >> 1);
            const int bit = std::countr_zero(gray ^ next_gray);
            gray = next_gray;
            e += state.field[bit];
            state.flip(bit);
            if (e < best_e || (e == best_e && state.z < best)) {
                best_e = e;
                best = state.z;
            }
        }
        SampleSet s;
        s.solutions.push_back(best);
        s.energies.push_back(energy(p, best));
        s.occurrences.push_back(reads);
        s.total_reads = reads;
        return s;
    }
};

std::string hash_key(const QuboProblem& p) {
    const auto h = p.content_hash();
    return std::string(reinterpret_cast<const char*>(h.data()), h.size());
}

nlohmann::json sample_set_to_json(const QuboProblem& p, const SampleSet& s) {
    nlohmann::json j = nlohmann::json::parse(p.to_json());
    auto sols = nlohmann::json::array();
    for (const auto& z : s.solutions) {
        sols.push_back(std::vector<int>(z.begin(), z.end()));
    }
    j["solutions"] = std::move(sols);
    j["energies"] = s.energies;
    j["occurrences"] = s.occurrences;
    j["total_reads"] = s.total_reads;
    return j;
}

SampleSet sample_set_from_json(const nlohmann::json& j) {
    SampleSet s;
    try {
        for (const auto& sol : j.at("solutions")) {
            const auto v = sol.get<std::vector<int>>();
            s.solutions.emplace_back(v.begin(), v.end());
        }
        s.energies = j.at("energies").get<std::vector<double>>();
        s.occurrences = j.at("occurrences").get<std::vector<std::int64_t>>();
        s.total_reads = j.at("total_reads").get<std::int64_t>();
    } catch (const nlohmann::json::exception& e) {
        throw CorruptError(std::string("bad replay record: ") + e.what());
    }
    if (s.solutions.size() != s.energies.size() || s.solutions.size() != s.occurrences.size()) {
        throw CorruptError("replay record field lengths disagree");
    }
    return s;
}

class ReplaySampler final : public Sampler {
public:
    explicit ReplaySampler(const std::string& path) : path_(path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) {
            throw IoError("cannot open replay file: " + path);
        }
        while (true) {
            char hash[32];
            in.read(hash, 32);
            if (in.gcount() == 0) break;
            if (in.gcount() != 32) throw TruncatedError("truncated replay record: " + path);
            std::uint64_t len_le = 0;
            char lenbuf[8];
            in.read(lenbuf, 8);
            if (in.gcount() != 8) throw TruncatedError("truncated replay record: " + path);
            for (int i = 0; i < 8; ++i) {
                len_le |= static_cast<std::uint64_t>(static_cast<unsigned char>(lenbuf[i])) << (8 * i);
            }
            std::string payload(len_le, '\0');
            in.read(payload.data(), static_cast<std::streamsize>(len_le));
            if (static_cast<std::uint64_t>(in.gcount()) != len_le) {
                throw TruncatedError("truncated replay record: " + path);
            }
            records_[std::string(hash, 32)] = std::move(payload);
        }
    }

protected:
    SampleSet do_sample(const QuboProblem& p, int /*reads*/) override {
        const auto it = records_.find(hash_key(p));
        if (it == records_.end()) {
            throw NotRecordedError("problem not recorded in replay file: " + path_);
        }
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(it->second);
        } catch (const nlohmann::json::exception& e) {
            throw CorruptError(std::string("bad replay record: ") + e.what());
        }
        // same hash: confirm the full problem matches before trusting it
        const QuboProblem stored = QuboProblem::from_json(it->second);
        if (stored.size() != p.size() || stored.q != p.q || stored.b != p.b ||
            stored.offset != p.offset) {
            throw CorruptError("replay hash collision: stored problem differs");
        }
        return sample_set_from_json(j);
    }

private:
    std::string path_;
    std::map<std::string, std::string> records_;
};

} // namespace

SampleSet Sampler::sample(const QuboProblem& p, int reads) {
    if (reads < 1) {
        throw ArgumentError("reads must be >= 1");
    }
    SampleSet s = do_sample(p, reads);
    if (!record_path_.empty()) {
        record_samples(p, s, record_path_);
    }
    return s;
}

std::vector<std::uint8_t> tabu_search(const QuboProblem& p, const TabuConfig& cfg) {
    if (cfg.restarts < 1) {
        throw ArgumentError("tabu search needs restarts >= 1");
    }
    const int n = p.size();
    const int tenure = cfg.tenure > 0 ? cfg.tenure : (n + 3) / 4;
    const long max_iters = cfg.max_iters > 0 ? cfg.max_iters : 50L * n;

    std::vector<std::uint8_t> best;
    double best_e = std::numeric_limits<double>::infinity();
    FlipState state(p);
    std::vector<long> tabu_until(n);
    for (int restart = 0; restart < cfg.restarts; ++restart) {
        auto rng = make_rng(cfg.seed, static_cast<std::uint64_t>(restart) + 1);
        state.reset(random_assignment(rng, n));
        double e = energy(p, state.z);
        std::fill(tabu_until.begin(), tabu_until.end(), -1L);
        double incumbent_e = e;
        std::vector<std::uint8_t> incumbent = state.z;
        for (long iter = 0; iter < max_iters; ++iter) {
            int move = -1;
            double move_delta = std::numeric_limits<double>::infinity();
            for (int i = 0; i < n; ++i) {
                const double d = state.field[i];
                const bool tabu = tabu_until[i] > iter;
                // aspiration: a tabu move that beats the incumbent is allowed
                if (tabu && !(e + d < incumbent_e)) {
                    continue;
                }
                if (d < move_delta) {
                    move_delta = d;
                    move = i;
                }
            }
            if (move < 0) {
                break; // everything tabu and nothing aspirates
            }
            e += move_delta;
            state.flip(move);
            tabu_until[move] = iter + tenure;
            if (e < incumbent_e) {
                incumbent_e = e;
                incumbent = state.z;
            }
        }
        if (incumbent_e < best_e || (incumbent_e == best_e && incumbent < best)) {
            best_e = incumbent_e;
            best = std::move(incumbent);
        }
    }
    return best;
}

std::unique_ptr<Sampler> make_simulated_annealer(const AnnealConfig& cfg) {
    return std::make_unique<SimulatedAnnealer>(cfg);
}

std::unique_ptr<Sampler> make_tabu_sampler(const TabuConfig& cfg) {
    return std::make_unique<TabuSampler>(cfg);
}

std::unique_ptr<Sampler> make_brute_force_sampler() {
    return std::make_unique<BruteForceSampler>();
}

std::unique_ptr<Sampler> make_replay_sampler(const std::string& path) {
    return std::make_unique<ReplaySampler>(path);
}

void record_samples(const QuboProblem& p, const SampleSet& s, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::app);
    if (!out) {
        throw IoError("cannot open replay file for append: " + path);
    }
    const auto hash = p.content_hash();
    const std::string payload = sample_set_to_json(p, s).dump();
    out.write(reinterpret_cast<const char*>(hash.data()), 32);
    const std::uint64_t len = payload.size();
    char lenbuf[8];
    for (int i = 0; i < 8; ++i) {
        lenbuf[i] = static_cast<char>(len >> (8 * i));
    }
    out.write(lenbuf, 8);
    out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
    if (!out) {
        throw IoError("replay append failed: " + path);
    }
}

} // namespace qsr
