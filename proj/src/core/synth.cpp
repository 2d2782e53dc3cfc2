#include "core/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "core/errors.hpp"
#include "core/parallel.hpp"
#include "core/qubo.hpp"
#include "core/rng.hpp"
#include "core/sr.hpp"

namespace qsr {

namespace {

constexpr int kRowsAll = 756;
constexpr int kRowsTrain = 36;
constexpr int kCols = 100;
constexpr int kSupport = 10;

// mean of |N(0,1)|; a selected atom stands in for a coefficient of this size
const double kMeanAbsNormal = std::sqrt(2.0 / M_PI);

} // namespace

SynthDataset generate_dataset(std::uint64_t seed) {
    auto rng = make_rng(seed, 0x5d47);
    Eigen::MatrixXd x_all(kRowsAll, kCols);
    for (int r = 0; r < kRowsAll; ++r) {
        for (int c = 0; c < kCols; ++c) {
            x_all(r, c) = normal01(rng);
        }
    }
    Eigen::VectorXd alpha(kSupport);
    for (int i = 0; i < kSupport; ++i) {
        alpha[i] = std::fabs(normal01(rng));
    }
    const Eigen::VectorXd y_all = x_all.leftCols(kSupport) * alpha;

    SynthDataset ds;
    ds.seed = seed;
    ds.x_train = x_all.topRows(kRowsTrain);
    ds.y_train = y_all.head(kRowsTrain);
    ds.x_val = x_all.bottomRows(kRowsAll - kRowsTrain);
    ds.y_val = y_all.tail(kRowsAll - kRowsTrain);
    ds.alpha_true = alpha;
    return ds;
}

double one_minus_r2(const Eigen::VectorXd& y_hat, const Eigen::VectorXd& y) {
    if (y_hat.size() != y.size()) {
        throw DimensionError("one_minus_r2: length mismatch");
    }
    if (y.size() < 2) {
        throw ArgumentError("one_minus_r2: need at least two samples");
    }
    const double mean = y.mean();
    const double ss_tot = (y.array() - mean).square().sum();
    if (ss_tot == 0.0) {
        throw ArgumentError("one_minus_r2: zero-variance target");
    }
    const double ss_res = (y - y_hat).squaredNorm();
    return ss_res / ss_tot;
}

std::vector<double> default_sweep_grid(SynthSolver solver) {
    if (solver == SynthSolver::lasso) {
        return {0.5, 1, 2, 4, 8, 15, 25, 40, 65, 100, 150, 220};
    }
    return {-400, -250, -150, -80, -30, 0, 50, 150, 300, 600, 1100, 1900, 3000};
}

const char* synth_solver_name(SynthSolver solver) {
    switch (solver) {
        case SynthSolver::lasso: return "lasso";
        case SynthSolver::classical_anneal: return "classical_anneal";
        case SynthSolver::ensemble_anneal: return "ensemble_anneal";
    }
    return "unknown";
}

namespace {

struct FitResult {
    double train_err = 0.0;
    double val_err = 0.0;
    double l0 = 0.0;
};

FitResult fit_lasso(const SynthDataset& ds, double lambda) {
    const Eigen::VectorXd alpha = lasso_solve(ds.x_train, ds.y_train, lambda);
    FitResult r;
    r.train_err = one_minus_r2(ds.x_train * alpha, ds.y_train);
    r.val_err = one_minus_r2(ds.x_val * alpha, ds.y_val);
    r.l0 = static_cast<double>((alpha.array().abs() > 1e-10).count());
    return r;
}

// The binary solvers code y against the gain-adjusted design g*X so that a
// set mask bit contributes mu*g = E|N(0,1)|, the coefficient scale the
// generator draws from. Predictions then live on the raw target scale.
FitResult fit_classical(const SynthDataset& ds, double lambda, const SynthConfig& cfg,
                        std::uint64_t stream) {
    const double gain = kMeanAbsNormal / cfg.mu;
    const Eigen::MatrixXd d = gain * ds.x_train;
    const QuboProblem p = build_sparse_coding_qubo(d, ds.y_train, lambda, cfg.mu);
    AnnealConfig anneal;
    anneal.sweeps = cfg.sweeps;
    anneal.reads = cfg.reads;
    anneal.seed = derive_seed(cfg.seed, stream);
    auto sampler = make_simulated_annealer(anneal);
    const SampleSet reads = sampler->sample(p, cfg.reads);
    const auto& best = reads.solutions.front();

    Eigen::VectorXd alpha = Eigen::VectorXd::Zero(kCols);
    for (int j = 0; j < kCols; ++j) {
        alpha[j] = cfg.mu * gain * best[j];
    }
    FitResult r;
    r.train_err = one_minus_r2(ds.x_train * alpha, ds.y_train);
    r.val_err = one_minus_r2(ds.x_val * alpha, ds.y_val);
    r.l0 = static_cast<double>(std::count(best.begin(), best.end(), std::uint8_t{1}));
    return r;
}

FitResult fit_ensemble(const SynthDataset& ds, double lambda, const SynthConfig& cfg,
                       std::uint64_t stream) {
    const double gain = kMeanAbsNormal / cfg.mu;
    const Eigen::MatrixXd d = gain * ds.x_train;
    const QuboProblem p = build_sparse_coding_qubo(d, ds.y_train, lambda, cfg.mu);

    TabuConfig tabu;
    tabu.restarts = cfg.tabu_restarts;
    tabu.seed = derive_seed(cfg.seed, stream ^ 0x7ab5ULL);
    const std::vector<std::uint8_t> warm = tabu_search(p, tabu);
    const int sub_size = std::min(cfg.sub_size, p.size());
    const std::vector<int> index = energy_impact_select(p, warm, sub_size);
    const QuboProblem sub = clamp_subproblem(p, warm, index);
    const SubproblemBatch batch = assemble_batch({sub}, cfg.batch_size);

    AnnealConfig anneal;
    anneal.sweeps = cfg.sweeps;
    anneal.reads = cfg.reads;
    anneal.seed = derive_seed(cfg.seed, stream);
    auto sampler = make_simulated_annealer(anneal);
    std::vector<SampleSet> results;
    for (const auto& problem : batch.problems) {
        results.push_back(sampler->sample(problem, cfg.reads));
    }
    const SampleSet reads = disassemble_batch(batch, {sub}, results).front();

    const Eigen::Index j_count = static_cast<Eigen::Index>(reads.size());
    Eigen::VectorXd energies(j_count), occurrences(j_count);
    for (Eigen::Index j = 0; j < j_count; ++j) {
        energies[j] = reads.energies[j];
        occurrences[j] = static_cast<double>(reads.occurrences[j]);
    }
    const double w_sum = occurrences.sum();
    const double mean = energies.dot(occurrences) / w_sum;
    const double var = (energies.array() - mean).square().matrix().dot(occurrences) / w_sum;
    const double sd = std::sqrt(std::max(0.0, var));
    const Eigen::VectorXd weights =
        boltzmann_weights(energies, occurrences, sd > 1e-12 ? 1.0 / sd : 0.0);

    Eigen::VectorXd alpha = Eigen::VectorXd::Zero(kCols);
    double l0 = 0.0;
    for (Eigen::Index j = 0; j < j_count; ++j) {
        std::vector<std::uint8_t> merged = merge_clamped(warm, index, reads.solutions[j]);
        double bits = 0.0;
        for (int a = 0; a < kCols; ++a) {
            alpha[a] += weights[j] * cfg.mu * gain * merged[a];
            bits += merged[a];
        }
        l0 += weights[j] * bits;
    }
    FitResult r;
    r.train_err = one_minus_r2(ds.x_train * alpha, ds.y_train);
    r.val_err = one_minus_r2(ds.x_val * alpha, ds.y_val);
    r.l0 = l0;
    return r;
}

} // namespace

SweepResult run_sweep(SynthSolver solver, const std::vector<double>& grid,
                      const SynthConfig& cfg) {
    if (grid.empty()) {
        throw ArgumentError("sweep grid is empty");
    }
    if (cfg.n_datasets < 1) {
        throw ArgumentError("need at least one dataset");
    }
    std::vector<SynthDataset> datasets(cfg.n_datasets);
    for (int d = 0; d < cfg.n_datasets; ++d) {
        datasets[d] = generate_dataset(derive_seed(cfg.seed, 0x5ee00ULL + d));
    }

    SweepResult result;
    result.solver = solver;
    result.points.resize(grid.size());

    // all (grid point, dataset) cells are independent
    const std::size_t cells = grid.size() * static_cast<std::size_t>(cfg.n_datasets);
    std::vector<FitResult> fits(cells);
    parallel_for(cells, cfg.threads, [&](std::size_t cell) {
        const std::size_t gi = cell / cfg.n_datasets;
        const int di = static_cast<int>(cell % cfg.n_datasets);
        const std::uint64_t stream = splitmix64(cell + 0x9d5ULL);
        switch (solver) {
            case SynthSolver::lasso:
                fits[cell] = fit_lasso(datasets[di], grid[gi]);
                break;
            case SynthSolver::classical_anneal:
                fits[cell] = fit_classical(datasets[di], grid[gi], cfg, stream);
                break;
            case SynthSolver::ensemble_anneal:
                fits[cell] = fit_ensemble(datasets[di], grid[gi], cfg, stream);
                break;
        }
    });

    for (std::size_t gi = 0; gi < grid.size(); ++gi) {
        auto& pt = result.points[gi];
        pt.knob = grid[gi];
        double m_tr = 0, m_va = 0, m_l0 = 0;
        for (int d = 0; d < cfg.n_datasets; ++d) {
            const auto& f = fits[gi * cfg.n_datasets + d];
            m_tr += f.train_err;
            m_va += f.val_err;
            m_l0 += f.l0;
        }
        const double n = cfg.n_datasets;
        m_tr /= n;
        m_va /= n;
        m_l0 /= n;
        double v_tr = 0, v_va = 0, v_l0 = 0;
        for (int d = 0; d < cfg.n_datasets; ++d) {
            const auto& f = fits[gi * cfg.n_datasets + d];
            v_tr += (f.train_err - m_tr) * (f.train_err - m_tr);
            v_va += (f.val_err - m_va) * (f.val_err - m_va);
            v_l0 += (f.l0 - m_l0) * (f.l0 - m_l0);
        }
        pt.mean_train_err = m_tr;
        pt.std_train_err = std::sqrt(v_tr / n);
        pt.mean_val_err = m_va;
        pt.std_val_err = std::sqrt(v_va / n);
        pt.mean_l0 = m_l0;
        pt.std_l0 = std::sqrt(v_l0 / n);
    }
    return result;
}

void write_sweep_csv(const std::vector<SweepResult>& sweeps, const std::string& path) {
    std::ofstream f(path);
    if (!f) {
        throw IoError("cannot write sweep CSV: " + path);
    }
    f.precision(12);
    f << "solver,knob,value,mean_train_err,std_train_err,mean_val_err,std_val_err,"
         "mean_l0,std_l0\n";
    for (const auto& sweep : sweeps) {
        for (const auto& p : sweep.points) {
            f << synth_solver_name(sweep.solver) << "," << sweep.knob_name << "," << p.knob
              << "," << p.mean_train_err << "," << p.std_train_err << "," << p.mean_val_err
              << "," << p.std_val_err << "," << p.mean_l0 << "," << p.std_l0 << "\n";
        }
    }
    if (!f) {
        throw IoError("sweep CSV write failed: " + path);
    }
}

namespace {

struct PlotRange {
    double x_min = 0, x_max = 1, y_min = 0, y_max = 1;
};

std::string svg_polyline(const std::vector<std::pair<double, double>>& pts,
                         const PlotRange& rng, const std::string& color, double width,
                         double opacity) {
    // map data coordinates into the 640x420 plot area with 60/20 margins
    auto mx = [&](double x) {
        return 60.0 + 560.0 * (x - rng.x_min) / std::max(1e-12, rng.x_max - rng.x_min);
    };
    auto my = [&](double y) {
        return 380.0 - 340.0 * (y - rng.y_min) / std::max(1e-12, rng.y_max - rng.y_min);
    };
    std::string s = "<polyline fill=\"none\" stroke=\"" + color + "\" stroke-width=\"" +
                    std::to_string(width) + "\" opacity=\"" + std::to_string(opacity) +
                    "\" points=\"";
    for (const auto& [x, y] : pts) {
        s += std::to_string(mx(x)) + "," + std::to_string(my(y)) + " ";
    }
    s += "\"/>\n";
    return s;
}

} // namespace

void write_sweep_svg(const std::vector<SweepResult>& sweeps, const std::string& path) {
    std::ofstream f(path);
    if (!f) {
        throw IoError("cannot write sweep SVG: " + path);
    }
    PlotRange rng;
    rng.x_min = 1e30;
    rng.x_max = -1e30;
    rng.y_min = 0.0;
    rng.y_max = 0.0;
    for (const auto& sweep : sweeps) {
        for (const auto& p : sweep.points) {
            rng.x_min = std::min(rng.x_min, p.mean_l0);
            rng.x_max = std::max(rng.x_max, p.mean_l0);
            rng.y_max = std::max({rng.y_max, p.mean_val_err + p.std_val_err,
                                  p.mean_train_err + p.std_train_err});
        }
    }
    if (rng.x_min > rng.x_max) {
        rng.x_min = 0;
        rng.x_max = 1;
    }
    f << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"680\" height=\"440\" "
         "viewBox=\"0 0 680 440\">\n";
    f << "<rect width=\"680\" height=\"440\" fill=\"white\"/>\n";
    f << "<line x1=\"60\" y1=\"380\" x2=\"620\" y2=\"380\" stroke=\"black\"/>\n";
    f << "<line x1=\"60\" y1=\"40\" x2=\"60\" y2=\"380\" stroke=\"black\"/>\n";
    f << "<text x=\"320\" y=\"420\" text-anchor=\"middle\" font-size=\"14\">support size "
         "||alpha||_0</text>\n";
    f << "<text x=\"18\" y=\"210\" text-anchor=\"middle\" font-size=\"14\" "
         "transform=\"rotate(-90 18 210)\">1 - R^2</text>\n";
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c"};
    int ci = 0;
    double legend_y = 56.0;
    for (const auto& sweep : sweeps) {
        const std::string color = colors[ci++ % 3];
        std::vector<std::pair<double, double>> val_pts, train_pts, hi, lo;
        for (const auto& p : sweep.points) {
            val_pts.push_back({p.mean_l0, p.mean_val_err});
            train_pts.push_back({p.mean_l0, p.mean_train_err});
            hi.push_back({p.mean_l0, p.mean_val_err + p.std_val_err});
            lo.push_back({p.mean_l0, p.mean_val_err - p.std_val_err});
        }
        f << svg_polyline(hi, rng, color, 1.0, 0.3);
        f << svg_polyline(lo, rng, color, 1.0, 0.3);
        f << svg_polyline(val_pts, rng, color, 2.0, 1.0);
        f << svg_polyline(train_pts, rng, color, 1.5, 0.55);
        f << "<text x=\"470\" y=\"" << legend_y << "\" font-size=\"13\" fill=\"" << color
          << "\">" << synth_solver_name(sweep.solver) << " val / train</text>\n";
        legend_y += 18.0;
    }
    f << "</svg>\n";
    if (!f) {
        throw IoError("sweep SVG write failed: " + path);
    }
}

} // namespace qsr
