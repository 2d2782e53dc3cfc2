#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "core/solvers.hpp"

namespace qsr {

// Simulated sparse-coding regression task: 756x100 Gaussian design, targets
// generated from the first 10 columns with non-negative coefficients, split
// into 36 training rows and 720 validation rows.
struct SynthDataset {
    Eigen::MatrixXd x_train; // 36 x 100
    Eigen::VectorXd y_train;
    Eigen::MatrixXd x_val; // 720 x 100
    Eigen::VectorXd y_val;
    Eigen::VectorXd alpha_true; // 10 non-negative entries
    std::uint64_t seed = 0;
};

SynthDataset generate_dataset(std::uint64_t seed);

// 1 - R^2 = SS_res / SS_tot with SS_tot about the mean of y.
double one_minus_r2(const Eigen::VectorXd& y_hat, const Eigen::VectorXd& y);

enum class SynthSolver { lasso, classical_anneal, ensemble_anneal };

struct SynthConfig {
    int n_datasets = 20;
    std::uint64_t seed = 0;
    double mu = 0.05;
    int reads = 50;
    int sweeps = 192;
    int sub_size = 32;
    int batch_size = 512;
    int tabu_restarts = 4;
    int threads = 1;
};

struct SweepPoint {
    double knob = 0.0;
    double mean_train_err = 0.0;
    double std_train_err = 0.0;
    double mean_val_err = 0.0;
    double std_val_err = 0.0;
    double mean_l0 = 0.0;
    double std_l0 = 0.0;
};

struct SweepResult {
    SynthSolver solver = SynthSolver::lasso;
    std::string knob_name = "lambda";
    std::vector<SweepPoint> points;
};

// Sparsity-axis grids that cover the interesting range for each solver; the
// annealing grids extend below zero because with binary masks the linear
// bias must turn negative before the mask grows dense.
std::vector<double> default_sweep_grid(SynthSolver solver);

const char* synth_solver_name(SynthSolver solver);

// Fits each dataset's training split at every grid value and records
// mean/std of train error, validation error and support size.
SweepResult run_sweep(SynthSolver solver, const std::vector<double>& grid,
                      const SynthConfig& cfg);

void write_sweep_csv(const std::vector<SweepResult>& sweeps, const std::string& path);
void write_sweep_svg(const std::vector<SweepResult>& sweeps, const std::string& path);

} // namespace qsr
