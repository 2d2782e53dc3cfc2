#include "core/qubo.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>
#include <numeric>

#include <nlohmann/json.hpp>

#include "core/errors.hpp"
#include "core/sha256.hpp"

namespace qsr {

namespace {

void check_finite(const QuboProblem& p) {
    if (!p.q.allFinite() || !p.b.allFinite() || !std::isfinite(p.offset)) {
        throw ArgumentError("QUBO coefficients must be finite");
    }
}

void check_binary(const QuboProblem& p, const std::vector<std::uint8_t>& z) {
    if (static_cast<int>(z.size()) != p.size()) {
        throw DimensionError("assignment length does not match problem size");
    }
    for (const auto v : z) {
        if (v > 1) {
            throw ArgumentError("assignment entries must be 0 or 1");
        }
    }
}

void append_f64(std::vector<std::uint8_t>& out, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    for (int i = 0; i < 8; ++i) {
        out.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
    }
}

void append_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
        out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
}

} // namespace

QuboProblem::QuboProblem(Eigen::MatrixXd q_in, Eigen::VectorXd b_in, double offset_in)
    : q(std::move(q_in)), b(std::move(b_in)), offset(offset_in) {
    if (q.rows() != q.cols() || q.rows() != b.size()) {
        throw DimensionError("QUBO matrix and vector sizes disagree");
    }
    if (!q.isApprox(q.transpose(), 0.0)) {
        // mirror the upper triangle so the stored matrix is exactly symmetric
        for (int i = 0; i < q.rows(); ++i) {
            for (int j = i + 1; j < q.cols(); ++j) {
                q(j, i) = q(i, j);
            }
        }
    }
    check_finite(*this);
}

std::vector<std::uint8_t> QuboProblem::canonical_bytes() const {
    std::vector<std::uint8_t> out;
    const int n = size();
    out.reserve(16 + 8 * (n + n * (n + 1) / 2) + 8);
    out.push_back('Q');
    out.push_back('S');
    out.push_back('R');
    out.push_back('Q');
    append_u64(out, static_cast<std::uint64_t>(n));
    append_f64(out, offset);
    for (int i = 0; i < n; ++i) {
        append_f64(out, b[i]);
    }
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            append_f64(out, q(i, j));
        }
    }
    return out;
}

std::array<std::uint8_t, 32> QuboProblem::content_hash() const {
    const auto bytes = canonical_bytes();
    return Sha256::digest(bytes.data(), bytes.size());
}

std::string QuboProblem::to_json() const {
    nlohmann::json j;
    const int n = size();
    j["n"] = n;
    auto quad = nlohmann::json::array();
    for (int i = 0; i < n; ++i) {
        for (int k = i; k < n; ++k) {
            if (q(i, k) != 0.0) {
                quad.push_back({i, k, q(i, k)});
            }
        }
    }
    j["q"] = std::move(quad);
    j["b"] = std::vector<double>(b.data(), b.data() + n);
    j["offset"] = offset;
    return j.dump();
}

QuboProblem QuboProblem::from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw CorruptError(std::string("bad QUBO JSON: ") + e.what());
    }
    try {
        const int n = j.at("n").get<int>();
        Eigen::MatrixXd q = Eigen::MatrixXd::Zero(n, n);
        for (const auto& entry : j.at("q")) {
            const int a = entry.at(0).get<int>();
            const int c = entry.at(1).get<int>();
            const double v = entry.at(2).get<double>();
            if (a < 0 || c < a || c >= n) {
                throw CorruptError("QUBO JSON coordinate out of range");
            }
            q(a, c) = v;
            q(c, a) = v;
        }
        const auto bv = j.at("b").get<std::vector<double>>();
        if (static_cast<int>(bv.size()) != n) {
            throw CorruptError("QUBO JSON linear term has wrong length");
        }
        Eigen::VectorXd b = Eigen::Map<const Eigen::VectorXd>(bv.data(), n);
        return QuboProblem(std::move(q), std::move(b), j.at("offset").get<double>());
    } catch (const nlohmann::json::exception& e) {
        throw CorruptError(std::string("bad QUBO JSON: ") + e.what());
    }
}

double energy(const QuboProblem& p, const std::vector<std::uint8_t>& z) {
    check_binary(p, z);
    const int n = p.size();
    double quad = 0.0;
    double lin = 0.0;
    for (int i = 0; i < n; ++i) {
        if (!z[i]) continue;
        lin += p.b[i];
        const double* row = p.q.col(i).data(); // column == row by symmetry
        double acc = 0.0;
        for (int j = 0; j < n; ++j) {
            if (z[j]) acc += row[j];
        }
        quad += acc;
    }
    return quad + lin;
}

double energy(const QuboProblem& p, const Eigen::VectorXd& z01) {
    std::vector<std::uint8_t> z(z01.size());
    for (Eigen::Index i = 0; i < z01.size(); ++i) {
        if (z01[i] != 0.0 && z01[i] != 1.0) {
            throw ArgumentError("assignment entries must be 0 or 1");
        }
        z[static_cast<std::size_t>(i)] = z01[i] != 0.0 ? 1 : 0;
    }
    return energy(p, z);
}

QuboProblem build_sparse_coding_qubo(const Eigen::MatrixXd& d_l, const Eigen::VectorXd& y,
                                     double lambda, double mu) {
    if (d_l.rows() != y.size()) {
        throw DimensionError("dictionary row count must match signal length");
    }
    Eigen::MatrixXd q = mu * (d_l.transpose() * d_l);
    Eigen::VectorXd b = -2.0 * (d_l.transpose() * y) +
                        lambda * Eigen::VectorXd::Ones(d_l.cols());
    return QuboProblem(std::move(q), std::move(b), y.squaredNorm());
}

namespace {

// Exact energy change of flipping variable i: for binary z, z^2 == z, so
// dE = (1 - 2 z_i) * (b_i + Q_ii + 2 * sum_{j != i} Q_ij z_j).
double flip_delta(const QuboProblem& p, const std::vector<std::uint8_t>& z, int i) {
    const int n = p.size();
    double coupling = 0.0;
    for (int j = 0; j < n; ++j) {
        if (j != i && z[j]) coupling += p.q(j, i);
    }
    const double sign = z[i] ? -1.0 : 1.0;
    return sign * (p.b[i] + p.q(i, i) + 2.0 * coupling);
}

} // namespace

std::vector<int> energy_impact_select(const QuboProblem& p,
                                      const std::vector<std::uint8_t>& z_star, int k) {
    check_binary(p, z_star);
    const int n = p.size();
    if (k > n || k < 0) {
        throw ArgumentError("selection count exceeds problem size");
    }
    std::vector<double> impact(n);
    for (int i = 0; i < n; ++i) {
        impact[i] = std::fabs(flip_delta(p, z_star, i));
    }
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        if (impact[a] != impact[b]) return impact[a] > impact[b];
        return a < b;
    });
    order.resize(k);
    std::sort(order.begin(), order.end());
    return order;
}

QuboProblem clamp_subproblem(const QuboProblem& p, const std::vector<std::uint8_t>& z_star,
                             const std::vector<int>& index) {
    check_binary(p, z_star);
    const int n = p.size();
    const int m = static_cast<int>(index.size());
    std::vector<std::uint8_t> in_sub(n, 0);
    for (const int i : index) {
        if (i < 0 || i >= n) {
            throw ArgumentError("clamp index out of range");
        }
        if (in_sub[i]) {
            throw ArgumentError("duplicate clamp index");
        }
        in_sub[i] = 1;
    }

    Eigen::MatrixXd q_sub(m, m);
    Eigen::VectorXd b_sub(m);
    for (int a = 0; a < m; ++a) {
        const int i = index[a];
        for (int c = 0; c < m; ++c) {
            q_sub(a, c) = p.q(i, index[c]);
        }
        double folded = 0.0;
        for (int j = 0; j < n; ++j) {
            if (!in_sub[j] && z_star[j]) folded += p.q(i, j);
        }
        b_sub[a] = p.b[i] + 2.0 * folded;
    }

    // energy of the frozen part alone
    double frozen = 0.0;
    for (int i = 0; i < n; ++i) {
        if (in_sub[i] || !z_star[i]) continue;
        frozen += p.b[i];
        for (int j = 0; j < n; ++j) {
            if (!in_sub[j] && z_star[j]) frozen += p.q(i, j);
        }
    }
    return QuboProblem(std::move(q_sub), std::move(b_sub), frozen);
}

std::vector<std::uint8_t> merge_clamped(const std::vector<std::uint8_t>& z_star,
                                        const std::vector<int>& index,
                                        const std::vector<std::uint8_t>& z_sub) {
    if (index.size() != z_sub.size()) {
        throw DimensionError("subproblem assignment length mismatch");
    }
    std::vector<std::uint8_t> merged = z_star;
    for (std::size_t a = 0; a < index.size(); ++a) {
        merged[static_cast<std::size_t>(index[a])] = z_sub[a];
    }
    return merged;
}

void SampleSet::sort_canonical() {
    std::vector<std::size_t> order(solutions.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (energies[a] != energies[b]) return energies[a] < energies[b];
        return solutions[a] < solutions[b];
    });
    SampleSet sorted;
    sorted.total_reads = total_reads;
    sorted.solutions.reserve(order.size());
    sorted.energies.reserve(order.size());
    sorted.occurrences.reserve(order.size());
    for (const auto i : order) {
        sorted.solutions.push_back(std::move(solutions[i]));
        sorted.energies.push_back(energies[i]);
        sorted.occurrences.push_back(occurrences[i]);
    }
    *this = std::move(sorted);
}

SampleSet SampleSet::from_reads(const QuboProblem& p,
                                const std::vector<std::vector<std::uint8_t>>& reads) {
    std::map<std::vector<std::uint8_t>, std::int64_t> counts;
    for (const auto& r : reads) {
        ++counts[r];
    }
    SampleSet s;
    s.total_reads = static_cast<std::int64_t>(reads.size());
    for (auto& [z, count] : counts) {
        s.solutions.push_back(z);
        s.energies.push_back(energy(p, z));
        s.occurrences.push_back(count);
    }
    s.sort_canonical();
    return s;
}

SubproblemBatch assemble_batch(const std::vector<QuboProblem>& subs, int batch_size) {
    if (subs.empty()) {
        throw ArgumentError("no subproblems to batch");
    }
    const int sub_size = subs.front().size();
    if (sub_size < 1 || sub_size > batch_size) {
        throw ArgumentError("subproblem size must be in [1, batch_size]");
    }
    for (const auto& s : subs) {
        if (s.size() != sub_size) {
            throw DimensionError("all subproblems must share one size");
        }
    }
    const int per_problem = batch_size / sub_size;
    SubproblemBatch batch;
    batch.batch_size = batch_size;
    batch.sub_size = sub_size;
    batch.placements.reserve(subs.size());

    const int n_problems = static_cast<int>((subs.size() + per_problem - 1) / per_problem);
    batch.problems.reserve(n_problems);
    for (int pi = 0; pi < n_problems; ++pi) {
        Eigen::MatrixXd q = Eigen::MatrixXd::Zero(batch_size, batch_size);
        Eigen::VectorXd b = Eigen::VectorXd::Zero(batch_size);
        for (int slot = 0; slot < per_problem; ++slot) {
            const std::size_t si = static_cast<std::size_t>(pi) * per_problem + slot;
            if (si >= subs.size()) break;
            const int off = slot * sub_size;
            q.block(off, off, sub_size, sub_size) = subs[si].q;
            b.segment(off, sub_size) = subs[si].b;
            batch.placements.push_back({pi, off, sub_size});
        }
        batch.problems.emplace_back(std::move(q), std::move(b), 0.0);
    }
    return batch;
}

std::vector<SampleSet> disassemble_batch(const SubproblemBatch& batch,
                                         const std::vector<QuboProblem>& subs,
                                         const std::vector<SampleSet>& results) {
    if (results.size() != batch.problems.size()) {
        throw DimensionError("one sample set per batch problem required");
    }
    if (subs.size() != batch.placements.size()) {
        throw DimensionError("one subproblem per placement required");
    }
    std::vector<SampleSet> out;
    out.reserve(batch.placements.size());
    for (std::size_t i = 0; i < batch.placements.size(); ++i) {
        const auto& place = batch.placements[i];
        const auto& full = results[static_cast<std::size_t>(place.problem)];
        std::map<std::vector<std::uint8_t>, std::int64_t> counts;
        for (std::size_t s = 0; s < full.size(); ++s) {
            std::vector<std::uint8_t> proj(full.solutions[s].begin() + place.offset,
                                           full.solutions[s].begin() + place.offset + place.size);
            counts[std::move(proj)] += full.occurrences[s];
        }
        SampleSet set;
        set.total_reads = full.total_reads;
        for (auto& [z, count] : counts) {
            set.solutions.push_back(z);
            set.energies.push_back(energy(subs[i], z));
            set.occurrences.push_back(count);
        }
        set.sort_canonical();
        out.push_back(std::move(set));
    }
    return out;
}

} // namespace qsr
