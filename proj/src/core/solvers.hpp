#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include <Eigen/Core>

#include "core/qubo.hpp"

namespace qsr {

// Coordinate-descent lasso for ||D a - y||^2 + lambda ||a||_1 (note: no 1/2
// on the quadratic, so the soft threshold sits at lambda/2). Stops when the
// largest coefficient change in a full pass drops below `tol`.
Eigen::VectorXd lasso_solve(const Eigen::MatrixXd& d, const Eigen::VectorXd& y, double lambda,
                            double tol = 1e-7, int max_passes = 10000);

// Gram-form lasso: minimizes a^T G a - 2 c^T a + lambda ||a||_1 where
// G = D^T D and c = D^T y. Used when many signals share one dictionary.
Eigen::VectorXd lasso_solve_gram(const Eigen::MatrixXd& gram, const Eigen::VectorXd& dty,
                                 double lambda, double tol = 1e-7, int max_passes = 10000,
                                 Eigen::VectorXd* warm = nullptr);

struct AnnealConfig {
    int sweeps = 128;
    int reads = 100;
    double beta_start = 0.1;
    double beta_end = 10.0;
    bool geometric = true; // beta interpolation: geometric or linear
    std::uint64_t seed = 0;
};

struct TabuConfig {
    int restarts = 8;
    int tenure = 0;    // 0: ceil(n/4)
    int max_iters = 0; // 0: 50*n
    std::uint64_t seed = 0;
};

// Multistart single-flip tabu search with recency tenure and aspiration.
// Returns the best assignment found across restarts; deterministic per seed.
std::vector<std::uint8_t> tabu_search(const QuboProblem& p, const TabuConfig& cfg);

// Samplers return a SampleSet whose energies re-evaluate exactly against the
// problem; all are deterministic for a fixed seed. When a record path is
// set, every served sample set is appended to that replay file.
class Sampler {
public:
    virtual ~Sampler() = default;
    SampleSet sample(const QuboProblem& p, int reads);
    void set_record_path(std::string path) { record_path_ = std::move(path); }
    void set_threads(int threads) { threads_ = threads < 1 ? 1 : threads; }
    int threads() const { return threads_; }

protected:
    virtual SampleSet do_sample(const QuboProblem& p, int reads) = 0;

private:
    std::string record_path_;
    int threads_ = 1;
};

std::unique_ptr<Sampler> make_simulated_annealer(const AnnealConfig& cfg);
std::unique_ptr<Sampler> make_tabu_sampler(const TabuConfig& cfg);
// Exhaustive enumeration; refuses problems with more than 24 variables.
std::unique_ptr<Sampler> make_brute_force_sampler();
// Serves previously recorded sample sets, looked up by problem content hash.
std::unique_ptr<Sampler> make_replay_sampler(const std::string& path);

// Appends (content hash, problem + samples as JSON) to a replay file.
void record_samples(const QuboProblem& p, const SampleSet& s, const std::string& path);

} // namespace qsr
