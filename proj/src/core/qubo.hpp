#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace qsr {

// Minimize z^T Q z + b^T z over binary z. Q is kept exactly symmetric;
// `offset` carries the constant dropped when a squared loss is expanded, so
// energy + offset can be compared against the original objective.
struct QuboProblem {
    Eigen::MatrixXd q;
    Eigen::VectorXd b;
    double offset = 0.0;

    QuboProblem() = default;
    QuboProblem(Eigen::MatrixXd q_in, Eigen::VectorXd b_in, double offset_in);

    int size() const { return static_cast<int>(b.size()); }

    // Canonical little-endian byte serialization; basis for content hashes.
    std::vector<std::uint8_t> canonical_bytes() const;
    std::array<std::uint8_t, 32> content_hash() const;

    std::string to_json() const;
    static QuboProblem from_json(const std::string& text);
};

// Distinct binary solutions with energies and occurrence counts, ordered by
// ascending energy (ties: lexicographically smaller vector first).
struct SampleSet {
    std::vector<std::vector<std::uint8_t>> solutions;
    std::vector<double> energies;
    std::vector<std::int64_t> occurrences;
    std::int64_t total_reads = 0;

    std::size_t size() const { return solutions.size(); }

    // Deduplicates raw reads against `p`, recomputing energies and sorting
    // into canonical order.
    static SampleSet from_reads(const QuboProblem& p,
                                const std::vector<std::vector<std::uint8_t>>& reads);
    void sort_canonical();
};

double energy(const QuboProblem& p, const std::vector<std::uint8_t>& z);
double energy(const QuboProblem& p, const Eigen::VectorXd& z01);

// Q = mu * D^T D, b = -2 D^T y + lambda * 1, offset = y^T y. The binary
// sparse-coding objective ||mu*D*m - y||^2 + lambda*mu*||m||_1 equals
// mu * energy(Q,b,m) + offset for every mask m.
QuboProblem build_sparse_coding_qubo(const Eigen::MatrixXd& d_l, const Eigen::VectorXd& y,
                                     double lambda, double mu);

// Indices of the k variables whose single flip from z_star changes the
// energy most (exact flip deltas). Ties prefer the smaller index; the
// returned list is sorted ascending.
std::vector<int> energy_impact_select(const QuboProblem& p,
                                      const std::vector<std::uint8_t>& z_star, int k);

// Restriction of `p` to `index`, with the remaining variables frozen at
// z_star: couplings to frozen variables fold into the linear terms and the
// frozen part's energy moves into the offset, so that
//   energy(sub, z_sub) + sub.offset == energy(p, merge(z_sub, z_star)).
QuboProblem clamp_subproblem(const QuboProblem& p, const std::vector<std::uint8_t>& z_star,
                             const std::vector<int>& index);

// Reassembles a full-size assignment from a clamped subproblem's solution.
std::vector<std::uint8_t> merge_clamped(const std::vector<std::uint8_t>& z_star,
                                        const std::vector<int>& index,
                                        const std::vector<std::uint8_t>& z_sub);

struct BlockPlacement {
    int problem = 0; // index into SubproblemBatch::problems
    int offset = 0;  // diagonal offset of this block's first variable
    int size = 0;
};

// Fixed-size problems whose diagonals carry up to batch_size/sub_size
// independent blocks; off-block couplings are zero and padding variables are
// inert (zero row and linear term).
struct SubproblemBatch {
    std::vector<QuboProblem> problems;
    std::vector<BlockPlacement> placements; // one per input subproblem
    int batch_size = 512;
    int sub_size = 32;
};

SubproblemBatch assemble_batch(const std::vector<QuboProblem>& subs, int batch_size = 512);

// Projects each batched read onto each block, re-deduplicates, sums
// occurrences, and recomputes energies against the block's subproblem.
std::vector<SampleSet> disassemble_batch(const SubproblemBatch& batch,
                                         const std::vector<QuboProblem>& subs,
                                         const std::vector<SampleSet>& results);

} // namespace qsr
