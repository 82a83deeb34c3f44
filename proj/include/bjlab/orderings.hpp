// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bjlab/errors.hpp"

namespace bjlab {

/// Pivot block pair, 1-based, first < second.
using PivotPair = std::pair<int, int>;

/// Do two pairs share a block index?  (A pair always conflicts with itself.)
inline bool pairs_conflict(const PivotPair& a, const PivotPair& b) {
    return a.first == b.first || a.first == b.second || a.second == b.first ||
           a.second == b.second;
}

/**
 * Finite sequence of pivot pairs over m blocks.
 *
 * A sequence is cyclic when every pair from P_m = {(i,j) : 1 <= i < j <= m}
 * appears exactly once (T = M) and quasi-cyclic when every pair appears at
 * least once (T >= M).
 */
struct PivotSequence {
    int m = 0;
    std::vector<PivotPair> pairs;

    PivotSequence() = default;
    PivotSequence(int m_, std::vector<PivotPair> pairs_);

    long T() const { return static_cast<long>(pairs.size()); }
    long M() const { return static_cast<long>(m) * (m - 1) / 2; }

    bool is_covering() const;
    bool is_cyclic() const;
    bool is_quasi_cyclic() const;

    bool operator==(const PivotSequence& o) const { return m == o.m && pairs == o.pairs; }
};

/// Permutation of block labels, 1-based images: image[k-1] = q(k).
struct BlockPermutation {
    std::vector<int> image;

    explicit BlockPermutation(std::vector<int> image_);
    static BlockPermutation identity(int m);
    /// The label reversal k -> m + 1 - k.
    static BlockPermutation reversal(int m);

    int m() const { return static_cast<int>(image.size()); }
    int operator()(int k) const { return image[static_cast<std::size_t>(k - 1)]; }
    BlockPermutation inverse() const;
    bool is_identity() const;
};

/**
 * Ordering matrix of a cyclic sequence: entry (i,j) = 0-based step at which
 * pair (i,j) occurs; the diagonal carries a sentinel rendered as "*".
 */
class OrderingMatrix {
public:
    explicit OrderingMatrix(const PivotSequence& o); ///< throws NotCyclic
    static OrderingMatrix from_entries(int m, const std::vector<std::vector<long>>& entries);

    int m() const { return m_; }
    long at(int i, int j) const; ///< 1-based; -1 on the diagonal
    PivotSequence to_sequence() const;
    std::string render() const; ///< aligned grid with "*" on the diagonal

    bool operator==(const OrderingMatrix& o) const { return m_ == o.m_ && step_ == o.step_; }

private:
    OrderingMatrix() = default;
    int m_ = 0;
    std::vector<long> step_; // row-major m x m, diagonal -1
};

/// Convenience alias mirroring the constructor.
OrderingMatrix ordering_matrix(const PivotSequence& o);

/// Swap neighbouring pairs at 0-based positions t, t+1; throws NotAdmissible if they share an index.
PivotSequence admissible_transposition(const PivotSequence& o, long t);

/// Sequence read backwards.
PivotSequence reverse(const PivotSequence& o);

/// Relabel blocks: (i,j) -> sorted (q(i), q(j)).
PivotSequence apply_block_permutation(const PivotSequence& o, const BlockPermutation& q);

/// Left rotation by r: move the first r pairs to the end.
PivotSequence rotate(const PivotSequence& o, long r);

/// Canonical column-wise serial ordering (1,2),(1,3),(2,3),(1,4),...
PivotSequence column_serial(int m);

/// Canonical row-wise serial ordering (1,2),(1,3),...,(1,m),(2,3),...
PivotSequence row_serial(int m);

/**
 * Equivalence via chains of admissible transpositions.  Decided by the
 * order-preservation criterion for cyclic sequences (index-sharing pairs must
 * appear in identical relative order) and by bounded search for quasi-cyclic
 * sequences with m <= 5 (UnsupportedSize beyond).
 */
bool are_equivalent(const PivotSequence& a, const PivotSequence& b);

/// Shift equivalence: smallest r >= 0 with rotate(a, r) == b, or nullopt.
std::optional<long> are_shift_equivalent(const PivotSequence& a, const PivotSequence& b);

/// One link of a weak-equivalence witness chain, starting from the queried sequence.
struct WeakChainLink {
    bool is_shift = false; ///< false: transposition chain (~), true: one rotation (s~)
    long shift = 0;        ///< rotation amount when is_shift
    PivotSequence to;
};

struct WeakEquivalenceResult {
    bool related = false;
    int d = 0; ///< number of shift links in the witness chain (minimal over chains found)
    std::vector<WeakChainLink> chain;
};

/**
 * Weak equivalence: closure of ~ and shifts.  Exact breadth-first search over
 * ~-classes with single-rotation edges; m <= 5 (UnsupportedSize beyond).
 */
WeakEquivalenceResult are_weak_equivalent(const PivotSequence& a, const PivotSequence& b);

/// Strategy class tags.
enum class OrderingClass {
    B_c,
    B_r,
    B_c_rev,
    B_r_rev,
    B_sp,
    B_spg,
    B_sg,
    barB_c,
    barB_r,
    barB_c_rev,
    barB_r_rev,
    barB_sp,
    barB_spg,
    barB_sg,
};

const char* to_string(OrderingClass k);
std::optional<OrderingClass> ordering_class_from_string(const std::string& name);

/// Membership witness for the generalized classes.
struct ClassWitness {
    OrderingClass anchor = OrderingClass::B_c; ///< structural class reached
    std::vector<int> q;                        ///< relabeling image (1-based); empty = identity
    int d = 0;                                 ///< shift links used
    int shape = 0;       ///< 0: structural; 1: relabel then weak chain; 2: weak chain then relabel
    PivotSequence target; ///< explicit structural member reached
    std::vector<WeakChainLink> chain; ///< weak chain from the queried sequence (pre-relabel)
};

struct GeneratedOrdering {
    PivotSequence seq;
    ClassWitness witness;
};

struct GenerateOptions {
    int requested_shifts = -1;         ///< exact shift count for *_sg kinds; -1 = random 0..2
    int requested_transpositions = -1; ///< -1 = random
};

/// Draw a member of the class, deterministic in (kind, m, seed).
GeneratedOrdering generate_class(OrderingClass kind, int m, std::uint64_t seed,
                                 const GenerateOptions& opts = {});

struct RecognitionResult {
    bool member = false;
    ClassWitness witness; ///< meaningful when member
};

/**
 * Decide membership of o in the given class.  Structural kinds work for any
 * m; kinds that require relabeling or weak-equivalence search are limited to
 * m <= 5 (UnsupportedSize beyond), except that a capped best-effort search is
 * run first and may return a positive witness for larger m.
 */
RecognitionResult recognize_class(OrderingClass kind, const PivotSequence& o);

} // namespace bjlab
