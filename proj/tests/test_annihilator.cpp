// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <map>
#include <utility>
#include <vector>

#include "bjlab/annihilator.hpp"
#include "bjlab/errors.hpp"
#include "bjlab/linalg.hpp"
#include "bjlab/matrix.hpp"
#include "bjlab/orderings.hpp"
#include "bjlab/partition.hpp"
#include "bjlab/rng.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace bjlab;

namespace {

std::vector<double> vec_of_random_symmetric(const Partition& p, Rng& rng) {
    return vec(random_symmetric(p.n(), rng), p).v;
}

bool is_permutation_matrix(const DenseMatrix& P) {
    if (P.rows() != P.cols()) return false;
    for (std::size_t i = 0; i < P.rows(); ++i) {
        long row_ones = 0;
        for (std::size_t j = 0; j < P.cols(); ++j) {
            const double x = P(i, j);
            if (x != 0.0 && x != 1.0) return false;
            row_ones += x == 1.0 ? 1 : 0;
        }
        if (row_ones != 1) return false;
    }
    for (std::size_t j = 0; j < P.cols(); ++j) {
        long col_ones = 0;
        for (std::size_t i = 0; i < P.rows(); ++i) col_ones += P(i, j) == 1.0 ? 1 : 0;
        if (col_ones != 1) return false;
    }
    return true;
}

DenseMatrix identity_dense(long n) {
    DenseMatrix I(n, n);
    for (long k = 0; k < n; ++k) I(k, k) = 1.0;
    return I;
}

DenseMatrix submatrix(const DenseMatrix& X, long r0, long r1, long c0, long c1) {
    DenseMatrix out(r1 - r0, c1 - c0);
    for (long r = r0; r < r1; ++r)
        for (long c = c0; c < c1; ++c) out(r - r0, c - c0) = X(r, c);
    return out;
}

double max_abs_vec(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

} // namespace

TEST_SUITE("annihilator") {

TEST_CASE("commutation matrix transposes the column-major stack") {
    Rng rng(3);
    for (auto [p, q] : std::vector<std::pair<int, int>>{{1, 1}, {3, 2}, {2, 4}}) {
        const DenseMatrix K = commutation_matrix(p, q);
        REQUIRE(K.rows() == static_cast<long>(p) * q);
        CHECK(is_permutation_matrix(K));
        DenseMatrix Z(p, q);
        for (long r = 0; r < p; ++r)
            for (long c = 0; c < q; ++c) Z(r, c) = rng.uniform(-1.0, 1.0);
        std::vector<double> vecZ(static_cast<std::size_t>(p) * static_cast<std::size_t>(q));
        std::vector<double> vecZt(vecZ.size());
        for (long c = 0; c < q; ++c)
            for (long r = 0; r < p; ++r) vecZ[static_cast<std::size_t>(c * p + r)] = Z(r, c);
        for (long r = 0; r < p; ++r)
            for (long c = 0; c < q; ++c) vecZt[static_cast<std::size_t>(r * q + c)] = Z(r, c);
        for (std::size_t row = 0; row < K.rows(); ++row) {
            double acc = 0.0;
            for (std::size_t col = 0; col < K.cols(); ++col) acc += K(row, col) * vecZ[col];
            CHECK(acc == vecZt[row]);
        }
        // K(q, p) is the inverse of K(p, q).
        const DenseMatrix back = multiply(commutation_matrix(q, p), K);
        CHECK(max_abs_diff(back, identity_dense(back.rows())) == 0.0);
    }
}

TEST_CASE("shuffle matrices match their stacked-row construction") {
    for (auto [nr, ni, nj] : std::vector<std::tuple<int, int, int>>{
             {1, 1, 1}, {2, 2, 2}, {2, 3, 1}, {3, 1, 2}}) {
        const ShuffleMatrices sh = shuffle_matrices(nr, ni, nj);
        CHECK(is_permutation_matrix(sh.S));
        CHECK(is_permutation_matrix(sh.S_tilde));
        CHECK(max_abs_diff(sh.S, commutation_matrix(nr, ni)) == 0.0);
        CHECK(max_abs_diff(sh.S_tilde, commutation_matrix(nj, nr)) == 0.0);

        // S stacks the row blocks I_ni (x) e_k^T for k = 1..nr.
        DenseMatrix stacked(static_cast<long>(ni) * nr, static_cast<long>(ni) * nr);
        for (int k = 0; k < nr; ++k) {
            DenseMatrix ekT(1, nr);
            ekT(0, k) = 1.0;
            const DenseMatrix blockrow = oracles::kron(identity_dense(ni), ekT);
            for (std::size_t r = 0; r < blockrow.rows(); ++r)
                for (std::size_t c = 0; c < blockrow.cols(); ++c)
                    stacked(static_cast<std::size_t>(k) * static_cast<std::size_t>(ni) + r, c) =
                        blockrow(r, c);
        }
        CHECK(max_abs_diff(sh.S, stacked) == 0.0);

        // S_tilde stacks the row blocks I_nr (x) e_k^T for k = 1..nj.
        DenseMatrix stacked_t(static_cast<long>(nj) * nr, static_cast<long>(nj) * nr);
        for (int k = 0; k < nj; ++k) {
            DenseMatrix ekT(1, nj);
            ekT(0, k) = 1.0;
            const DenseMatrix blockrow = oracles::kron(identity_dense(nr), ekT);
            for (std::size_t r = 0; r < blockrow.rows(); ++r)
                for (std::size_t c = 0; c < blockrow.cols(); ++c)
                    stacked_t(static_cast<std::size_t>(k) * static_cast<std::size_t>(nr) + r, c) =
                        blockrow(r, c);
        }
        CHECK(max_abs_diff(sh.S_tilde, stacked_t) == 0.0);
    }
}

TEST_CASE("shuffle matrices interchange Kronecker factor order") {
    Rng rng(9);
    for (auto [nr, ni, nj] : std::vector<std::tuple<int, int, int>>{
             {1, 2, 3}, {2, 2, 2}, {3, 2, 1}, {2, 1, 3}}) {
        const ShuffleMatrices sh = shuffle_matrices(nr, ni, nj);
        DenseMatrix Uij(ni, nj);
        for (long r = 0; r < ni; ++r)
            for (long c = 0; c < nj; ++c) Uij(r, c) = rng.uniform(-1.0, 1.0);
        DenseMatrix Uji(nj, ni);
        for (long r = 0; r < nj; ++r)
            for (long c = 0; c < ni; ++c) Uji(r, c) = rng.uniform(-1.0, 1.0);
        const DenseMatrix lhs1 = multiply(oracles::kron(identity_dense(nr), Uij), transpose(sh.S_tilde));
        const DenseMatrix rhs1 = multiply(sh.S, oracles::kron(Uij, identity_dense(nr)));
        CHECK(max_abs_diff(lhs1, rhs1) <= 1e-15);
        const DenseMatrix lhs2 = multiply(oracles::kron(Uji, identity_dense(nr)), transpose(sh.S));
        const DenseMatrix rhs2 = multiply(sh.S_tilde, oracles::kron(identity_dense(nr), Uji));
        CHECK(max_abs_diff(lhs2, rhs2) <= 1e-15);
    }
}

TEST_CASE("construction validates pivot order and orthogonality") {
    Rng rng(1);
    const Partition p({2, 1, 2});
    CHECK_THROWS_AS(Annihilator(p, BlockIndex{3, 1}, random_orthogonal(3, rng)), InvalidArgument);
    DenseMatrix skewed = identity_dense(4);
    skewed(0, 1) = 0.5;
    CHECK_THROWS_AS(Annihilator(p, BlockIndex{1, 3}, skewed), InvalidArgument);
    CHECK_THROWS_AS(Annihilator(p, BlockIndex{1, 2}, identity_dense(4)), DimensionMismatch);
}

TEST_CASE("two blocks: the step operator vanishes identically") {
    Rng rng(5);
    for (const std::vector<int>& sizes : {std::vector<int>{1, 1}, {2, 3}}) {
        const Partition p(sizes);
        const Annihilator r(p, BlockIndex{1, 2}, random_orthogonal(p.n(), rng));
        const std::vector<double> a = vec_of_random_symmetric(p, rng);
        CHECK(max_abs_vec(r.apply(a)) == 0.0);
        CHECK(max_abs(r.materialize()) == 0.0);
    }
}

TEST_CASE("identity transformation only wipes the pivot segment") {
    Rng rng(6);
    const Partition p({2, 1, 2});
    const Annihilator r(p, BlockIndex{1, 3}, identity_dense(4));
    const std::vector<double> a = vec_of_random_symmetric(p, rng);
    const std::vector<double> out = r.apply(a);
    const long off = vec_block_offset(p, 1, 3);
    const long len = 4;
    for (long k = 0; k < p.K(); ++k) {
        if (k >= off && k < off + len)
            CHECK(out[static_cast<std::size_t>(k)] == 0.0);
        else
            CHECK(out[static_cast<std::size_t>(k)] == a[static_cast<std::size_t>(k)]);
    }
}

TEST_CASE("fast application agrees with the dense congruence oracle") {
    Rng rng(17);
    const std::vector<std::pair<std::vector<int>, BlockIndex>> cases = {
        {{2, 2, 2, 2}, {1, 2}}, {{2, 2, 2, 2}, {1, 3}}, {{2, 2, 2, 2}, {2, 4}},
        {{2, 2, 2, 2}, {3, 4}}, {{3, 2, 1, 2}, {1, 2}}, {{3, 2, 1, 2}, {2, 4}},
        {{3, 2, 1, 2}, {1, 4}}, {{3, 2, 1, 2}, {3, 4}}, {{1, 1, 1}, {1, 3}},
    };
    for (const auto& [sizes, pivot] : cases) {
        const Partition p(sizes);
        const int order = p.sizes()[static_cast<std::size_t>(pivot.i - 1)] +
                          p.sizes()[static_cast<std::size_t>(pivot.j - 1)];
        const DenseMatrix hatU = random_orthogonal(order, rng);
        const Annihilator r(p, pivot, hatU);
        const std::vector<double> a = vec_of_random_symmetric(p, rng);
        const std::vector<double> fast = r.apply(a);
        const std::vector<double> slow = oracles::annihilator_apply(p, pivot, hatU, a);
        REQUIRE(fast.size() == slow.size());
        for (std::size_t k = 0; k < fast.size(); ++k)
            CHECK(fast[k] == doctest::Approx(slow[k]).epsilon(1e-13));
    }
}

TEST_CASE("materialization assembles the columns of the action") {
    Rng rng(23);
    const Partition p({2, 1, 2});
    const Annihilator r(p, BlockIndex{1, 2}, random_orthogonal(3, rng));
    const DenseMatrix R = r.materialize();
    REQUIRE(R.rows() == p.K());
    for (long k = 0; k < p.K(); ++k) {
        std::vector<double> e(static_cast<std::size_t>(p.K()), 0.0);
        e[static_cast<std::size_t>(k)] = 1.0;
        const std::vector<double> col = r.apply(e);
        for (long row = 0; row < p.K(); ++row)
            CHECK(R(row, k) == doctest::Approx(col[static_cast<std::size_t>(row)]).epsilon(1e-14));
        const std::vector<double> rowv = r.apply_transpose(e);
        for (long cidx = 0; cidx < p.K(); ++cidx)
            CHECK(R(k, cidx) == doctest::Approx(rowv[static_cast<std::size_t>(cidx)]).epsilon(1e-14));
    }
}

TEST_CASE("materialized step operator on four 2x2 blocks has the documented layout") {
    Rng rng(29);
    const Partition p({2, 2, 2, 2});
    REQUIRE(p.K() == 24);
    const DenseMatrix hatU = random_orthogonal(4, rng);
    const DenseMatrix R = Annihilator(p, BlockIndex{1, 2}, hatU).materialize();

    const DenseMatrix U11t = transpose(submatrix(hatU, 0, 2, 0, 2));
    const DenseMatrix U12t = transpose(submatrix(hatU, 0, 2, 2, 4));
    const DenseMatrix U21t = transpose(submatrix(hatU, 2, 4, 0, 2));
    const DenseMatrix U22t = transpose(submatrix(hatU, 2, 4, 2, 4));
    const DenseMatrix I2 = identity_dense(2);

    DenseMatrix expected(24, 24);
    auto put = [&expected](std::size_t r0, std::size_t c0, const DenseMatrix& B) {
        for (std::size_t r = 0; r < B.rows(); ++r)
            for (std::size_t c = 0; c < B.cols(); ++c) expected(r0 + r, c0 + c) = B(r, c);
    };
    // Pivot rows/columns (coordinates 0..3) stay zero.  For each bystander
    // block r > 2 the pair rows (1,r),(2,r) mix through I (x) hatU^T blocks.
    put(4, 4, oracles::kron(I2, U11t));
    put(4, 8, oracles::kron(I2, U21t));
    put(8, 4, oracles::kron(I2, U12t));
    put(8, 8, oracles::kron(I2, U22t));
    put(12, 12, oracles::kron(I2, U11t));
    put(12, 16, oracles::kron(I2, U21t));
    put(16, 12, oracles::kron(I2, U12t));
    put(16, 16, oracles::kron(I2, U22t));
    put(20, 20, identity_dense(4));

    CHECK(max_abs_diff(R, expected) <= 1e-15);
}

TEST_CASE("single off-diagonal entry: the operator is the zero scalar") {
    const Partition p({1, 1});
    const Annihilator r(p, BlockIndex{1, 2}, identity_dense(2));
    REQUIRE(p.K() == 1);
    CHECK(r.materialize()(0, 0) == 0.0);
    CHECK(r.apply({3.5})[0] == 0.0);
}

TEST_CASE("transposed annihilator materializes to the transpose") {
    Rng rng(31);
    const Partition p({2, 1, 2});
    const Annihilator r(p, BlockIndex{2, 3}, random_orthogonal(3, rng));
    const Annihilator rt = annihilator_transpose(r);
    CHECK(max_abs_diff(rt.materialize(), transpose(r.materialize())) <= 1e-14);
    const std::vector<double> a = vec_of_random_symmetric(p, rng);
    const std::vector<double> via_member = r.apply_transpose(a);
    const std::vector<double> via_op = rt.apply(a);
    for (std::size_t k = 0; k < via_member.size(); ++k)
        CHECK(via_member[k] == doctest::Approx(via_op[k]).epsilon(1e-14));

    // A symmetric transformation is a fixed point of transposition.
    DenseMatrix sym = identity_dense(3);
    sym(0, 0) = -1.0;
    const Annihilator s(p, BlockIndex{2, 3}, sym);
    CHECK(max_abs_diff(annihilator_transpose(s).materialize(), s.materialize()) == 0.0);
}

TEST_CASE("spectral norm of a step operator is one for three or more blocks") {
    Rng rng(37);
    const std::vector<std::pair<std::vector<int>, BlockIndex>> cases = {
        {{1, 1, 1}, {1, 2}},
        {{2, 1, 2}, {1, 2}},
        {{2, 1, 2}, {1, 3}},
        {{2, 1, 2}, {2, 3}},
        {{2, 2, 2, 2}, {2, 3}},
    };
    for (const auto& [sizes, pivot] : cases) {
        const Partition p(sizes);
        const int order = p.sizes()[static_cast<std::size_t>(pivot.i - 1)] +
                          p.sizes()[static_cast<std::size_t>(pivot.j - 1)];
        const Annihilator r(p, pivot, random_orthogonal(order, rng));
        CHECK(oracles::spectral_norm(r.materialize()) == doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("identity factors over a covering sequence drain every entry") {
    Rng rng(41);
    const Partition p({2, 1, 2});
    const PivotSequence o = column_serial(3);
    const std::vector<DenseMatrix> factors = {identity_dense(3), identity_dense(4),
                                              identity_dense(3)};
    const BlockJacobiOperator J = build_operator(p, o, factors);
    const std::vector<double> a = vec_of_random_symmetric(p, rng);
    CHECK(max_abs_vec(J.apply(a)) == 0.0);
    CHECK(operator_norm(J) == 0.0);
}

TEST_CASE("identity factors over a partial sequence keep norm one") {
    const Partition p({1, 1, 1});
    const PivotSequence o(3, {{1, 2}});
    const BlockJacobiOperator J = build_operator(p, o, {identity_dense(2)});
    CHECK(operator_norm(J) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("a single-factor operator is that annihilator") {
    Rng rng(43);
    const Partition p({2, 2, 1});
    const DenseMatrix hatU = random_orthogonal(4, rng);
    const BlockJacobiOperator J = build_operator(p, PivotSequence(3, {{1, 2}}), {hatU});
    const Annihilator r(p, BlockIndex{1, 2}, hatU);
    CHECK(max_abs_diff(J.materialize(), r.materialize()) == 0.0);
    REQUIRE(J.steps().size() == 1);
    CHECK(J.steps()[0].pivot() == BlockIndex{1, 2});
}

TEST_CASE("operator application replays the step-by-step congruence trace") {
    Rng rng(47);
    for (const std::vector<int>& sizes : {std::vector<int>{1, 1, 1}, {2, 1, 2}}) {
        const Partition p(sizes);
        const PivotSequence o = rotate(column_serial(3), 1);
        std::vector<DenseMatrix> factors;
        std::vector<double> cur = vec_of_random_symmetric(p, rng);
        const std::vector<double> start = cur;
        for (const PivotPair& pr : o.pairs) {
            const BlockIndex pivot{pr.first, pr.second};
            const int order = p.sizes()[static_cast<std::size_t>(pivot.i - 1)] +
                              p.sizes()[static_cast<std::size_t>(pivot.j - 1)];
            const DenseMatrix hatU = random_orthogonal(order, rng);
            factors.push_back(hatU);
            cur = oracles::annihilator_apply(p, pivot, hatU, cur);
        }
        const BlockJacobiOperator J = build_operator(p, o, factors);
        const std::vector<double> end = J.apply(start);
        REQUIRE(end.size() == cur.size());
        for (std::size_t k = 0; k < end.size(); ++k)
            CHECK(end[k] == doctest::Approx(cur[k]).epsilon(1e-12));
        // The product materializes with the first factor rightmost.
        DenseMatrix prod = identity_dense(p.K());
        for (std::size_t t = 0; t < o.pairs.size(); ++t) {
            const BlockIndex pivot{o.pairs[t].first, o.pairs[t].second};
            prod = multiply(Annihilator(p, pivot, factors[t]).materialize(), prod);
        }
        CHECK(max_abs_diff(J.materialize(), prod) <= 1e-13);
    }
}

TEST_CASE("operator norms sit between zero and one") {
    Rng rng(53);
    const Partition p({2, 1, 2});
    const PivotSequence o = column_serial(3);
    std::vector<DenseMatrix> factors;
    for (const PivotPair& pr : o.pairs) {
        const int order = p.sizes()[static_cast<std::size_t>(pr.first - 1)] +
                          p.sizes()[static_cast<std::size_t>(pr.second - 1)];
        factors.push_back(random_orthogonal(order, rng));
    }
    const BlockJacobiOperator J = build_operator(p, o, factors);
    const double norm = operator_norm(J);
    CHECK(norm > 0.0);
    CHECK(norm <= 1.0 + 1e-12);
    CHECK(norm == doctest::Approx(oracles::spectral_norm(J.materialize())).epsilon(1e-9));
}

TEST_CASE("transposed operator reverses the sequence and transposes factors") {
    Rng rng(59);
    const Partition p({1, 2, 1});
    const PivotSequence o = column_serial(3);
    std::vector<DenseMatrix> factors;
    for (const PivotPair& pr : o.pairs) {
        const int order = p.sizes()[static_cast<std::size_t>(pr.first - 1)] +
                          p.sizes()[static_cast<std::size_t>(pr.second - 1)];
        factors.push_back(random_orthogonal(order, rng));
    }
    const BlockJacobiOperator J = build_operator(p, o, factors);
    const BlockJacobiOperator Jt = J.transposed();
    CHECK(max_abs_diff(Jt.materialize(), transpose(J.materialize())) <= 1e-13);
    REQUIRE(Jt.steps().size() == J.steps().size());
    CHECK(Jt.steps().front().pivot() == J.steps().back().pivot());
}

TEST_CASE("admissible transpositions with shared factors leave the operator unchanged") {
    Rng rng(61);
    const Partition p({1, 1, 1, 1});
    const PivotSequence o = column_serial(4);
    std::map<PivotPair, DenseMatrix> by_pair;
    for (const PivotPair& pr : o.pairs) by_pair.emplace(pr, random_orthogonal(2, rng));
    auto factors_for = [&by_pair](const PivotSequence& seq) {
        std::vector<DenseMatrix> f;
        for (const PivotPair& pr : seq.pairs) f.push_back(by_pair.at(pr));
        return f;
    };
    int checked = 0;
    for (long t = 0; t + 1 < o.T(); ++t) {
        if (pairs_conflict(o.pairs[static_cast<std::size_t>(t)],
                           o.pairs[static_cast<std::size_t>(t + 1)]))
            continue;
        const PivotSequence swapped = admissible_transposition(o, t);
        const BlockJacobiOperator J1 = build_operator(p, o, factors_for(o));
        const BlockJacobiOperator J2 = build_operator(p, swapped, factors_for(swapped));
        CHECK(max_abs_diff(J1.materialize(), J2.materialize()) <= 1e-14);
        ++checked;
    }
    CHECK(checked > 0);
}

TEST_CASE("block relabeling conjugates the operator by a permutation") {
    Rng rng(67);
    for (const std::vector<int>& sizes : {std::vector<int>{1, 1, 1, 1}, {2, 1, 2}}) {
        const Partition p(sizes);
        const int m = p.m();
        const PivotSequence o = column_serial(m);
        std::vector<std::pair<BlockIndex, DenseMatrix>> factors;
        std::vector<DenseMatrix> plain;
        for (const PivotPair& pr : o.pairs) {
            const int order = p.sizes()[static_cast<std::size_t>(pr.first - 1)] +
                              p.sizes()[static_cast<std::size_t>(pr.second - 1)];
            const DenseMatrix hatU = random_orthogonal(order, rng);
            factors.emplace_back(BlockIndex{pr.first, pr.second}, hatU);
            plain.push_back(hatU);
        }
        const BlockJacobiOperator J = build_operator(p, o, plain);

        std::vector<int> q_image(static_cast<std::size_t>(m));
        for (int k = 0; k < m; ++k) q_image[static_cast<std::size_t>(k)] = k + 1;
        rng.shuffle(q_image);

        const auto [pq, relabeled] = relabel_operator_data(p, factors, q_image);
        CHECK(pq == permuted_sizes(p, inverse_permutation(q_image)));
        const BlockJacobiOperator Jq(pq, relabeled);
        const DenseMatrix P = vec_relabel_matrix(p, q_image);
        CHECK(is_permutation_matrix(P));
        const DenseMatrix conj = multiply(multiply(P, J.materialize()), transpose(P));
        CHECK(max_abs_diff(Jq.materialize(), conj) <= 1e-13);

        // The relabeled pivot list is the relabeled sequence, pairs normalized.
        const PivotSequence oq = apply_block_permutation(o, BlockPermutation(q_image));
        REQUIRE(relabeled.size() == oq.pairs.size());
        for (std::size_t t = 0; t < relabeled.size(); ++t) {
            CHECK(relabeled[t].first.i == oq.pairs[t].first);
            CHECK(relabeled[t].first.j == oq.pairs[t].second);
        }
    }
}

} // TEST_SUITE
