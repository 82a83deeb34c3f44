// SPDX-License-Identifier: Apache-2.0

#include "bjlab/orderings.hpp"

#include <algorithm>
#include <bit>
#include <cstddef>
#include <functional>
#include <map>
#include <numeric>
#include <queue>
#include <set>
#include <sstream>
#include <unordered_map>

#include "bjlab/rng.hpp"

namespace bjlab {

// ---------------------------------------------------------------------------
// PivotSequence / BlockPermutation / OrderingMatrix
// ---------------------------------------------------------------------------

PivotSequence::PivotSequence(int m_, std::vector<PivotPair> pairs_)
    : m(m_), pairs(std::move(pairs_)) {
    if (m < 1) throw InvalidArgument("PivotSequence: m must be >= 1");
    for (const auto& p : pairs) {
        if (p.first < 1 || p.second <= p.first || p.second > m)
            throw InvalidArgument("PivotSequence: pair (" + std::to_string(p.first) + "," +
                                  std::to_string(p.second) + ") out of range for m=" +
                                  std::to_string(m));
    }
}

bool PivotSequence::is_covering() const {
    std::set<PivotPair> seen(pairs.begin(), pairs.end());
    return static_cast<long>(seen.size()) == M();
}

bool PivotSequence::is_cyclic() const { return T() == M() && is_covering(); }

bool PivotSequence::is_quasi_cyclic() const { return is_covering(); }

BlockPermutation::BlockPermutation(std::vector<int> image_) : image(std::move(image_)) {
    std::vector<bool> hit(image.size(), false);
    for (int v : image) {
        if (v < 1 || v > static_cast<int>(image.size()) || hit[static_cast<std::size_t>(v - 1)])
            throw InvalidArgument("BlockPermutation: image is not a bijection");
        hit[static_cast<std::size_t>(v - 1)] = true;
    }
}

BlockPermutation BlockPermutation::identity(int m) {
    std::vector<int> img(static_cast<std::size_t>(m));
    std::iota(img.begin(), img.end(), 1);
    return BlockPermutation(std::move(img));
}

BlockPermutation BlockPermutation::reversal(int m) {
    std::vector<int> img(static_cast<std::size_t>(m));
    for (int k = 1; k <= m; ++k) img[static_cast<std::size_t>(k - 1)] = m + 1 - k;
    return BlockPermutation(std::move(img));
}

BlockPermutation BlockPermutation::inverse() const {
    std::vector<int> inv(image.size());
    for (int k = 1; k <= m(); ++k) inv[static_cast<std::size_t>(image[static_cast<std::size_t>(k - 1)] - 1)] = k;
    return BlockPermutation(std::move(inv));
}

bool BlockPermutation::is_identity() const {
    for (int k = 1; k <= m(); ++k)
        if ((*this)(k) != k) return false;
    return true;
}

OrderingMatrix::OrderingMatrix(const PivotSequence& o) {
    if (!o.is_cyclic())
        throw NotCyclic("ordering matrix requires a cyclic sequence (every pair exactly once)");
    m_ = o.m;
    step_.assign(static_cast<std::size_t>(m_) * m_, -1);
    for (long t = 0; t < o.T(); ++t) {
        const auto [i, j] = o.pairs[static_cast<std::size_t>(t)];
        step_[static_cast<std::size_t>(i - 1) * m_ + (j - 1)] = t;
        step_[static_cast<std::size_t>(j - 1) * m_ + (i - 1)] = t;
    }
}

OrderingMatrix OrderingMatrix::from_entries(int m, const std::vector<std::vector<long>>& entries) {
    if (static_cast<int>(entries.size()) != m)
        throw InvalidArgument("OrderingMatrix::from_entries: wrong row count");
    OrderingMatrix M;
    M.m_ = m;
    M.step_.assign(static_cast<std::size_t>(m) * m, -1);
    std::vector<bool> used(static_cast<std::size_t>(m) * (m - 1) / 2, false);
    for (int i = 0; i < m; ++i) {
        if (static_cast<int>(entries[static_cast<std::size_t>(i)].size()) != m)
            throw InvalidArgument("OrderingMatrix::from_entries: wrong column count");
        for (int j = 0; j < m; ++j) {
            const long e = entries[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            if (i == j) {
                if (e >= 0) throw InvalidArgument("OrderingMatrix::from_entries: diagonal must be negative");
                continue;
            }
            if (e != entries[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)])
                throw InvalidArgument("OrderingMatrix::from_entries: not symmetric");
            if (e < 0 || e >= static_cast<long>(used.size()))
                throw InvalidArgument("OrderingMatrix::from_entries: step out of range");
            if (i < j) {
                if (used[static_cast<std::size_t>(e)])
                    throw InvalidArgument("OrderingMatrix::from_entries: duplicate step");
                used[static_cast<std::size_t>(e)] = true;
            }
            M.step_[static_cast<std::size_t>(i) * m + j] = e;
        }
    }
    return M;
}

long OrderingMatrix::at(int i, int j) const {
    if (i < 1 || i > m_ || j < 1 || j > m_)
        throw InvalidArgument("OrderingMatrix::at: index out of range");
    return step_[static_cast<std::size_t>(i - 1) * m_ + (j - 1)];
}

PivotSequence OrderingMatrix::to_sequence() const {
    const long M = static_cast<long>(m_) * (m_ - 1) / 2;
    std::vector<PivotPair> pairs(static_cast<std::size_t>(M));
    for (int i = 1; i <= m_; ++i)
        for (int j = i + 1; j <= m_; ++j) pairs[static_cast<std::size_t>(at(i, j))] = {i, j};
    return PivotSequence(m_, std::move(pairs));
}

std::string OrderingMatrix::render() const {
    long maxstep = 0;
    for (long s : step_) maxstep = std::max(maxstep, s);
    const int width = static_cast<int>(std::to_string(std::max(maxstep, 1L)).size());
    std::ostringstream out;
    for (int i = 1; i <= m_; ++i) {
        for (int j = 1; j <= m_; ++j) {
            if (j > 1) out << ' ';
            const long e = at(i, j);
            std::string cell = (i == j) ? "*" : std::to_string(e);
            out << std::string(static_cast<std::size_t>(width) - std::min<std::size_t>(width, cell.size()), ' ')
                << cell;
        }
        out << '\n';
    }
    return out.str();
}

OrderingMatrix ordering_matrix(const PivotSequence& o) { return OrderingMatrix(o); }

// ---------------------------------------------------------------------------
// Elementary moves
// ---------------------------------------------------------------------------

PivotSequence admissible_transposition(const PivotSequence& o, long t) {
    if (t < 0 || t + 1 >= o.T())
        throw InvalidArgument("admissible_transposition: position out of range");
    const auto& a = o.pairs[static_cast<std::size_t>(t)];
    const auto& b = o.pairs[static_cast<std::size_t>(t + 1)];
    if (pairs_conflict(a, b))
        throw NotAdmissible("admissible_transposition: neighbouring pairs share a block index");
    PivotSequence r = o;
    std::swap(r.pairs[static_cast<std::size_t>(t)], r.pairs[static_cast<std::size_t>(t + 1)]);
    return r;
}

PivotSequence reverse(const PivotSequence& o) {
    PivotSequence r = o;
    std::reverse(r.pairs.begin(), r.pairs.end());
    return r;
}

PivotSequence apply_block_permutation(const PivotSequence& o, const BlockPermutation& q) {
    if (q.m() != o.m) throw DimensionMismatch("apply_block_permutation: permutation size mismatch");
    PivotSequence r = o;
    for (auto& p : r.pairs) {
        int a = q(p.first), b = q(p.second);
        if (a > b) std::swap(a, b);
        p = {a, b};
    }
    return r;
}

PivotSequence rotate(const PivotSequence& o, long r) {
    if (o.T() == 0) return o;
    const long T = o.T();
    long s = ((r % T) + T) % T;
    PivotSequence out = o;
    std::rotate(out.pairs.begin(), out.pairs.begin() + s, out.pairs.end());
    return out;
}

PivotSequence column_serial(int m) {
    std::vector<PivotPair> pairs;
    for (int j = 2; j <= m; ++j)
        for (int i = 1; i < j; ++i) pairs.emplace_back(i, j);
    return PivotSequence(m, std::move(pairs));
}

PivotSequence row_serial(int m) {
    std::vector<PivotPair> pairs;
    for (int i = 1; i < m; ++i)
        for (int j = i + 1; j <= m; ++j) pairs.emplace_back(i, j);
    return PivotSequence(m, std::move(pairs));
}

// ---------------------------------------------------------------------------
// Equivalence machinery
// ---------------------------------------------------------------------------

namespace {

// Lexicographically smallest representative of the transposition class: a
// greedy topological order of the occurrence-precedence DAG (edges between
// index-sharing occurrences in sequence order), always emitting the smallest
// available pair.  Two sequences are transposition-equivalent exactly when
// these representatives coincide.
std::vector<PivotPair> canonical_trace(const PivotSequence& o) {
    const long T = o.T();
    std::vector<std::vector<long>> succ(static_cast<std::size_t>(T));
    std::vector<int> indeg(static_cast<std::size_t>(T), 0);
    for (long v = 0; v < T; ++v)
        for (long u = 0; u < v; ++u)
            if (pairs_conflict(o.pairs[static_cast<std::size_t>(u)], o.pairs[static_cast<std::size_t>(v)])) {
                succ[static_cast<std::size_t>(u)].push_back(v);
                ++indeg[static_cast<std::size_t>(v)];
            }
    using Item = std::pair<PivotPair, long>;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> ready;
    for (long u = 0; u < T; ++u)
        if (indeg[static_cast<std::size_t>(u)] == 0) ready.push({o.pairs[static_cast<std::size_t>(u)], u});
    std::vector<PivotPair> out;
    out.reserve(static_cast<std::size_t>(T));
    while (!ready.empty()) {
        const auto [p, u] = ready.top();
        ready.pop();
        out.push_back(p);
        for (long v : succ[static_cast<std::size_t>(u)])
            if (--indeg[static_cast<std::size_t>(v)] == 0) ready.push({o.pairs[static_cast<std::size_t>(v)], v});
    }
    return out;
}

std::string trace_key(const std::vector<PivotPair>& c) {
    std::string s;
    s.reserve(2 * c.size());
    for (const auto& p : c) {
        s.push_back(static_cast<char>(p.first));
        s.push_back(static_cast<char>(p.second));
    }
    return s;
}

bool same_multiset(const PivotSequence& a, const PivotSequence& b) {
    if (a.T() != b.T()) return false;
    auto pa = a.pairs, pb = b.pairs;
    std::sort(pa.begin(), pa.end());
    std::sort(pb.begin(), pb.end());
    return pa == pb;
}

// Order-preservation criterion for cyclic sequences: same pair set and every
// index-sharing pair of pairs appears in the same relative order.
bool equivalent_cyclic(const PivotSequence& a, const PivotSequence& b) {
    std::map<PivotPair, long> pos;
    for (long t = 0; t < b.T(); ++t) pos[b.pairs[static_cast<std::size_t>(t)]] = t;
    if (static_cast<long>(pos.size()) != a.T()) return false;
    for (long u = 0; u < a.T(); ++u) {
        auto iu = pos.find(a.pairs[static_cast<std::size_t>(u)]);
        if (iu == pos.end()) return false;
        for (long v = u + 1; v < a.T(); ++v) {
            if (!pairs_conflict(a.pairs[static_cast<std::size_t>(u)], a.pairs[static_cast<std::size_t>(v)]))
                continue;
            auto iv = pos.find(a.pairs[static_cast<std::size_t>(v)]);
            if (iv == pos.end() || iu->second > iv->second) return false;
        }
    }
    return true;
}

// --- weak-equivalence search -----------------------------------------------

struct WeakNode {
    int parent = -1;
    PivotSequence member; ///< representative of the parent class that was rotated
    long r = 0;           ///< rotation amount applied to member
    PivotSequence rep;    ///< canonical representative of this class
    int depth = 0;
};

struct WeakSearch {
    bool found = false;
    bool capped = false;
    int hit = -1;
    std::vector<WeakNode> nodes;
};

// Enumerate prefix-closed occurrence sets (downsets) of the precedence DAG of
// `rep`; every class member's rotation split corresponds to exactly one such
// set.  Returns false if the leaf budget was exhausted.
bool enumerate_downsets(const PivotSequence& rep, std::size_t* budget,
                        const std::function<void(std::uint64_t)>& emit) {
    const int T = static_cast<int>(rep.T());
    std::vector<std::uint64_t> predmask(static_cast<std::size_t>(T), 0);
    for (int v = 0; v < T; ++v)
        for (int u = 0; u < v; ++u)
            if (pairs_conflict(rep.pairs[static_cast<std::size_t>(u)], rep.pairs[static_cast<std::size_t>(v)]))
                predmask[static_cast<std::size_t>(v)] |= (1ull << u);
    std::function<bool(int, std::uint64_t)> rec = [&](int idx, std::uint64_t mask) -> bool {
        if (idx == T) {
            if (*budget == 0) return false;
            --*budget;
            const int cnt = std::popcount(mask);
            if (cnt > 0 && cnt < T) emit(mask);
            return true;
        }
        if (!rec(idx + 1, mask)) return false;
        if ((predmask[static_cast<std::size_t>(idx)] & mask) == predmask[static_cast<std::size_t>(idx)])
            return rec(idx + 1, mask | (1ull << idx));
        return true;
    };
    return rec(0, 0);
}

WeakSearch weak_bfs(const PivotSequence& start, const std::function<bool(const PivotSequence&)>& accept,
                    std::size_t class_cap, std::size_t leaf_budget) {
    WeakSearch search;
    std::unordered_map<std::string, int> index;

    auto add_node = [&](WeakNode node, const std::string& key) -> int {
        const int id = static_cast<int>(search.nodes.size());
        search.nodes.push_back(std::move(node));
        index.emplace(key, id);
        return id;
    };

    WeakNode root;
    root.rep = PivotSequence(start.m, canonical_trace(start));
    const std::string root_key = trace_key(root.rep.pairs);
    add_node(std::move(root), root_key);

    if (accept(search.nodes[0].rep)) {
        search.found = true;
        search.hit = 0;
        return search;
    }

    std::queue<int> frontier;
    frontier.push(0);
    while (!frontier.empty()) {
        const int cur = frontier.front();
        frontier.pop();
        const PivotSequence rep = search.nodes[static_cast<std::size_t>(cur)].rep;
        const int depth = search.nodes[static_cast<std::size_t>(cur)].depth;
        bool ok = enumerate_downsets(rep, &leaf_budget, [&](std::uint64_t mask) {
            if (search.found) return;
            const int T = static_cast<int>(rep.T());
            std::vector<PivotPair> member_pairs;
            member_pairs.reserve(static_cast<std::size_t>(T));
            for (int u = 0; u < T; ++u)
                if (mask & (1ull << u)) member_pairs.push_back(rep.pairs[static_cast<std::size_t>(u)]);
            const long r = static_cast<long>(member_pairs.size());
            for (int u = 0; u < T; ++u)
                if (!(mask & (1ull << u))) member_pairs.push_back(rep.pairs[static_cast<std::size_t>(u)]);
            PivotSequence member(rep.m, std::move(member_pairs));
            PivotSequence rotated = rotate(member, r);
            PivotSequence child_rep(rep.m, canonical_trace(rotated));
            const std::string key = trace_key(child_rep.pairs);
            if (index.count(key) || search.nodes.size() >= class_cap) {
                if (search.nodes.size() >= class_cap) search.capped = true;
                return;
            }
            WeakNode node;
            node.parent = cur;
            node.member = std::move(member);
            node.r = r;
            node.rep = std::move(child_rep);
            node.depth = depth + 1;
            const int id = add_node(std::move(node), key);
            if (accept(search.nodes[static_cast<std::size_t>(id)].rep)) {
                search.found = true;
                search.hit = id;
            } else {
                frontier.push(id);
            }
        });
        if (!ok) search.capped = true;
        if (search.found || search.capped) break;
    }
    return search;
}

std::vector<WeakChainLink> build_chain(const WeakSearch& search, int node) {
    std::vector<int> path;
    for (int u = node; u != -1; u = search.nodes[static_cast<std::size_t>(u)].parent) path.push_back(u);
    std::reverse(path.begin(), path.end());
    std::vector<WeakChainLink> chain;
    chain.push_back({false, 0, search.nodes[static_cast<std::size_t>(path[0])].rep});
    for (std::size_t k = 1; k < path.size(); ++k) {
        const WeakNode& nd = search.nodes[static_cast<std::size_t>(path[k])];
        chain.push_back({false, 0, nd.member});
        chain.push_back({true, nd.r, rotate(nd.member, nd.r)});
        chain.push_back({false, 0, nd.rep});
    }
    return chain;
}

// --- structural parsers ------------------------------------------------------

bool parse_Bc_exact(const PivotSequence& o) {
    if (o.m < 2 || !o.is_cyclic()) return false;
    if (o.pairs[0] != PivotPair{1, 2}) return false;
    std::size_t t = 1;
    for (int j = 3; j <= o.m; ++j) {
        std::set<int> firsts;
        for (int c = 0; c < j - 1; ++c, ++t) {
            if (o.pairs[t].second != j) return false;
            firsts.insert(o.pairs[t].first);
        }
        if (static_cast<int>(firsts.size()) != j - 1) return false;
    }
    return true;
}

bool parse_Br_exact(const PivotSequence& o) {
    if (o.m < 2 || !o.is_cyclic()) return false;
    std::size_t t = 0;
    for (int i = o.m - 1; i >= 1; --i) {
        std::set<int> seconds;
        for (int c = 0; c < o.m - i; ++c, ++t) {
            if (o.pairs[t].first != i) return false;
            seconds.insert(o.pairs[t].second);
        }
        if (static_cast<int>(seconds.size()) != o.m - i) return false;
    }
    return true;
}

bool parse_barBc_exact(const PivotSequence& o) {
    if (o.m < 2 || !o.is_quasi_cyclic() || o.T() >= 2 * o.M()) return false;
    if (o.pairs[0] != PivotPair{1, 2}) return false;
    std::size_t t = 1;
    for (int j = 3; j <= o.m; ++j) {
        std::set<int> firsts;
        for (int c = 0; c < j - 1; ++c, ++t) {
            if (t >= o.pairs.size() || o.pairs[t].second != j) return false;
            firsts.insert(o.pairs[t].first);
        }
        if (static_cast<int>(firsts.size()) != j - 1) return false;
        while (t < o.pairs.size() && o.pairs[t].second <= j) ++t; // repeat segment
        if (j < o.m && (t >= o.pairs.size() || o.pairs[t].second != j + 1)) return false;
    }
    return t == o.pairs.size();
}

bool parse_barBr_exact(const PivotSequence& o) {
    return parse_barBc_exact(apply_block_permutation(o, BlockPermutation::reversal(o.m)));
}

// --- class-respecting matchers (decide whether some member of the
//     transposition class of `o` has the structural form) ---------------------

bool sim_match_Bc(const PivotSequence& o) {
    if (!o.is_cyclic()) return false;
    for (long u = 0; u < o.T(); ++u)
        for (long v = u + 1; v < o.T(); ++v) {
            const auto& a = o.pairs[static_cast<std::size_t>(u)];
            const auto& b = o.pairs[static_cast<std::size_t>(v)];
            if (pairs_conflict(a, b) && a.second > b.second) return false;
        }
    return true;
}

bool sim_match_Br(const PivotSequence& o) {
    if (!o.is_cyclic()) return false;
    for (long u = 0; u < o.T(); ++u)
        for (long v = u + 1; v < o.T(); ++v) {
            const auto& a = o.pairs[static_cast<std::size_t>(u)];
            const auto& b = o.pairs[static_cast<std::size_t>(v)];
            if (pairs_conflict(a, b) && a.first < b.first) return false;
        }
    return true;
}

PivotSequence sort_by_max(const PivotSequence& o) {
    PivotSequence r = o;
    std::stable_sort(r.pairs.begin(), r.pairs.end(),
                     [](const PivotPair& a, const PivotPair& b) { return a.second < b.second; });
    return r;
}

PivotSequence sort_by_min_desc(const PivotSequence& o) {
    PivotSequence r = o;
    std::stable_sort(r.pairs.begin(), r.pairs.end(),
                     [](const PivotPair& a, const PivotPair& b) { return a.first > b.first; });
    return r;
}

// Greedy scheduler: decide whether some member of the transposition class of
// `o` has the quasi-cyclic column-serial shape, and produce that member.  The
// column groups are forced (first occurrences in precedence order) and repeat
// phases are emitted maximally, which is optimal because emitting earlier
// only enlarges the set of available occurrences.
bool sim_match_barBc(const PivotSequence& o, PivotSequence* member_out) {
    if (o.m < 2 || !o.is_quasi_cyclic() || o.T() >= 2 * o.M()) return false;
    const long T = o.T();
    std::vector<std::uint64_t> predmask(static_cast<std::size_t>(T), 0);
    for (long v = 0; v < T; ++v)
        for (long u = 0; u < v; ++u)
            if (pairs_conflict(o.pairs[static_cast<std::size_t>(u)], o.pairs[static_cast<std::size_t>(v)]))
                predmask[static_cast<std::size_t>(v)] |= (1ull << u);
    std::map<PivotPair, long> first_occ;
    for (long t = 0; t < T; ++t)
        first_occ.emplace(o.pairs[static_cast<std::size_t>(t)], t);

    std::uint64_t emitted = 0;
    std::vector<long> order;
    order.reserve(static_cast<std::size_t>(T));
    auto available = [&](long u) {
        return !(emitted & (1ull << u)) &&
               (predmask[static_cast<std::size_t>(u)] & emitted) == predmask[static_cast<std::size_t>(u)];
    };
    auto emit = [&](long u) {
        emitted |= (1ull << u);
        order.push_back(u);
    };

    for (int j = 2; j <= o.m; ++j) {
        std::vector<long> group;
        for (int a = 1; a < j; ++a) group.push_back(first_occ.at({a, j}));
        std::sort(group.begin(), group.end()); // occurrences sharing j: precedence = sequence order
        for (long u : group) {
            if (!available(u)) return false;
            emit(u);
        }
        if (j >= 3) {
            bool progress = true;
            while (progress) {
                progress = false;
                for (long u = 0; u < T; ++u)
                    if (o.pairs[static_cast<std::size_t>(u)].second <= j && available(u)) {
                        emit(u);
                        progress = true;
                    }
            }
        }
    }
    if (static_cast<long>(order.size()) != T) return false;
    if (member_out) {
        std::vector<PivotPair> pairs;
        pairs.reserve(static_cast<std::size_t>(T));
        for (long u : order) pairs.push_back(o.pairs[static_cast<std::size_t>(u)]);
        *member_out = PivotSequence(o.m, std::move(pairs));
    }
    return true;
}

// Match against any of the four serial shapes; on success report the shape and
// an explicit structural member of the class.
bool match_serial_family(const PivotSequence& o, OrderingClass* anchor, PivotSequence* target) {
    if (sim_match_Bc(o)) {
        *anchor = OrderingClass::B_c;
        *target = sort_by_max(o);
        return true;
    }
    if (sim_match_Br(o)) {
        *anchor = OrderingClass::B_r;
        *target = sort_by_min_desc(o);
        return true;
    }
    const PivotSequence rev = reverse(o);
    if (sim_match_Bc(rev)) {
        *anchor = OrderingClass::B_c_rev;
        *target = reverse(sort_by_max(rev));
        return true;
    }
    if (sim_match_Br(rev)) {
        *anchor = OrderingClass::B_r_rev;
        *target = reverse(sort_by_min_desc(rev));
        return true;
    }
    return false;
}

bool match_bar_family(const PivotSequence& o, OrderingClass* anchor, PivotSequence* target) {
    PivotSequence memb;
    if (sim_match_barBc(o, &memb)) {
        *anchor = OrderingClass::barB_c;
        *target = memb;
        return true;
    }
    const BlockPermutation rev_labels = BlockPermutation::reversal(o.m);
    if (sim_match_barBc(apply_block_permutation(o, rev_labels), &memb)) {
        *anchor = OrderingClass::barB_r;
        *target = apply_block_permutation(memb, rev_labels);
        return true;
    }
    const PivotSequence rev = reverse(o);
    if (sim_match_barBc(rev, &memb)) {
        *anchor = OrderingClass::barB_c_rev;
        *target = reverse(memb);
        return true;
    }
    if (sim_match_barBc(apply_block_permutation(rev, rev_labels), &memb)) {
        *anchor = OrderingClass::barB_r_rev;
        *target = reverse(apply_block_permutation(memb, rev_labels));
        return true;
    }
    return false;
}

// Search all relabelings (identity first) for a serial/bar-serial family
// match of the relabeled sequence.
bool relabel_match(const PivotSequence& o, bool bar, std::vector<int>* q_image, OrderingClass* anchor,
                   PivotSequence* target) {
    std::vector<int> img(static_cast<std::size_t>(o.m));
    std::iota(img.begin(), img.end(), 1);
    do {
        const BlockPermutation q{std::vector<int>(img)};
        const PivotSequence o2 = apply_block_permutation(o, q);
        const bool hit = bar ? match_bar_family(o2, anchor, target) : match_serial_family(o2, anchor, target);
        if (hit) {
            *q_image = img;
            return true;
        }
    } while (std::next_permutation(img.begin(), img.end()));
    return false;
}

constexpr std::size_t kClassCap = 300000;
constexpr std::size_t kLeafBudget = 20000000;
constexpr std::size_t kBestEffortClassCap = 400;
constexpr std::size_t kBestEffortLeafBudget = 400000;

} // namespace

bool are_equivalent(const PivotSequence& a, const PivotSequence& b) {
    if (a.m != b.m || a.T() != b.T()) return false;
    if (a.is_cyclic() && b.is_cyclic()) return equivalent_cyclic(a, b);
    if (a.m > 5)
        throw UnsupportedSize("are_equivalent: quasi-cyclic comparison supported for m <= 5");
    if (!same_multiset(a, b)) return false;
    return canonical_trace(a) == canonical_trace(b);
}

std::optional<long> are_shift_equivalent(const PivotSequence& a, const PivotSequence& b) {
    if (a.m != b.m || a.T() != b.T()) return std::nullopt;
    for (long r = 0; r < std::max<long>(a.T(), 1); ++r)
        if (rotate(a, r) == b) return r;
    return std::nullopt;
}

WeakEquivalenceResult are_weak_equivalent(const PivotSequence& a, const PivotSequence& b) {
    WeakEquivalenceResult res;
    if (a.m != b.m || !same_multiset(a, b)) return res;
    if (a.m > 5) throw UnsupportedSize("are_weak_equivalent: supported for m <= 5");
    const std::string target = trace_key(canonical_trace(b));
    WeakSearch search = weak_bfs(
        a, [&](const PivotSequence& rep) { return trace_key(rep.pairs) == target; }, kClassCap,
        kLeafBudget);
    if (!search.found) {
        if (search.capped)
            throw UnsupportedSize("are_weak_equivalent: search budget exceeded");
        return res;
    }
    res.related = true;
    res.d = search.nodes[static_cast<std::size_t>(search.hit)].depth;
    res.chain = build_chain(search, search.hit);
    res.chain.push_back({false, 0, b});
    return res;
}

// ---------------------------------------------------------------------------
// Class names
// ---------------------------------------------------------------------------

const char* to_string(OrderingClass k) {
    switch (k) {
        case OrderingClass::B_c: return "B_c";
        case OrderingClass::B_r: return "B_r";
        case OrderingClass::B_c_rev: return "B_c_rev";
        case OrderingClass::B_r_rev: return "B_r_rev";
        case OrderingClass::B_sp: return "B_sp";
        case OrderingClass::B_spg: return "B_spg";
        case OrderingClass::B_sg: return "B_sg";
        case OrderingClass::barB_c: return "barB_c";
        case OrderingClass::barB_r: return "barB_r";
        case OrderingClass::barB_c_rev: return "barB_c_rev";
        case OrderingClass::barB_r_rev: return "barB_r_rev";
        case OrderingClass::barB_sp: return "barB_sp";
        case OrderingClass::barB_spg: return "barB_spg";
        case OrderingClass::barB_sg: return "barB_sg";
    }
    return "unknown";
}

std::optional<OrderingClass> ordering_class_from_string(const std::string& name) {
    static const std::map<std::string, OrderingClass> table = {
        {"B_c", OrderingClass::B_c},
        {"B_r", OrderingClass::B_r},
        {"B_c_rev", OrderingClass::B_c_rev},
        {"B_r_rev", OrderingClass::B_r_rev},
        {"B_sp", OrderingClass::B_sp},
        {"B_spg", OrderingClass::B_spg},
        {"B_sg", OrderingClass::B_sg},
        {"barB_c", OrderingClass::barB_c},
        {"barB_r", OrderingClass::barB_r},
        {"barB_c_rev", OrderingClass::barB_c_rev},
        {"barB_r_rev", OrderingClass::barB_r_rev},
        {"barB_sp", OrderingClass::barB_sp},
        {"barB_spg", OrderingClass::barB_spg},
        {"barB_sg", OrderingClass::barB_sg},
    };
    auto it = table.find(name);
    if (it == table.end()) return std::nullopt;
    return it->second;
}

// ---------------------------------------------------------------------------
// Generation
// ---------------------------------------------------------------------------

namespace {

PivotSequence random_transposition_walk(PivotSequence s, int count, Rng& rng) {
    for (int k = 0; k < count; ++k) {
        std::vector<long> admissible;
        for (long t = 0; t + 1 < s.T(); ++t)
            if (!pairs_conflict(s.pairs[static_cast<std::size_t>(t)], s.pairs[static_cast<std::size_t>(t + 1)]))
                admissible.push_back(t);
        if (admissible.empty()) break;
        s = admissible_transposition(s, admissible[rng.below(admissible.size())]);
    }
    return s;
}

PivotSequence random_Bc(int m, Rng& rng) {
    std::vector<PivotPair> pairs;
    pairs.emplace_back(1, 2);
    for (int j = 3; j <= m; ++j) {
        std::vector<int> firsts(static_cast<std::size_t>(j - 1));
        std::iota(firsts.begin(), firsts.end(), 1);
        rng.shuffle(firsts);
        for (int a : firsts) pairs.emplace_back(a, j);
    }
    return PivotSequence(m, std::move(pairs));
}

PivotSequence random_Br(int m, Rng& rng) {
    std::vector<PivotPair> pairs;
    for (int i = m - 1; i >= 1; --i) {
        std::vector<int> seconds;
        for (int s = i + 1; s <= m; ++s) seconds.push_back(s);
        rng.shuffle(seconds);
        for (int s : seconds) pairs.emplace_back(i, s);
    }
    return PivotSequence(m, std::move(pairs));
}

PivotSequence random_barBc(int m, Rng& rng) {
    std::vector<PivotPair> pairs;
    pairs.emplace_back(1, 2);
    const long M = static_cast<long>(m) * (m - 1) / 2;
    // total repeats < M keeps the overall length below 2M
    const long extra_total = (m >= 3 && M > 1) ? static_cast<long>(rng.below(static_cast<std::uint64_t>(M))) : 0;
    std::vector<long> extra(static_cast<std::size_t>(m + 1), 0);
    for (long e = 0; e < extra_total; ++e) ++extra[3 + rng.below(static_cast<std::uint64_t>(m - 2))];
    for (int j = 3; j <= m; ++j) {
        std::vector<int> firsts(static_cast<std::size_t>(j - 1));
        std::iota(firsts.begin(), firsts.end(), 1);
        rng.shuffle(firsts);
        for (int a : firsts) pairs.emplace_back(a, j);
        for (long e = 0; e < extra[static_cast<std::size_t>(j)]; ++e) {
            const int b = 2 + static_cast<int>(rng.below(static_cast<std::uint64_t>(j - 1)));
            const int a = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(b - 1)));
            pairs.emplace_back(a, b);
        }
    }
    return PivotSequence(m, std::move(pairs));
}

struct SerialDraw {
    PivotSequence seq;
    OrderingClass anchor;
};

SerialDraw draw_serial(int m, Rng& rng, bool bar) {
    const int pick = static_cast<int>(rng.below(4));
    if (!bar) {
        switch (pick) {
            case 0: return {random_Bc(m, rng), OrderingClass::B_c};
            case 1: return {random_Br(m, rng), OrderingClass::B_r};
            case 2: return {reverse(random_Bc(m, rng)), OrderingClass::B_c_rev};
            default: return {reverse(random_Br(m, rng)), OrderingClass::B_r_rev};
        }
    }
    const BlockPermutation rev_labels = BlockPermutation::reversal(m);
    switch (pick) {
        case 0: return {random_barBc(m, rng), OrderingClass::barB_c};
        case 1: return {apply_block_permutation(random_barBc(m, rng), rev_labels), OrderingClass::barB_r};
        case 2: return {reverse(random_barBc(m, rng)), OrderingClass::barB_c_rev};
        default:
            return {reverse(apply_block_permutation(random_barBc(m, rng), rev_labels)),
                    OrderingClass::barB_r_rev};
    }
}

std::uint64_t kind_salt(OrderingClass k) { return 0x9e3779b97f4a7c15ull * (static_cast<std::uint64_t>(k) + 1); }

} // namespace

GeneratedOrdering generate_class(OrderingClass kind, int m, std::uint64_t seed, const GenerateOptions& opts) {
    if (m < 2) throw InvalidArgument("generate_class: m must be >= 2");
    Rng rng(seed ^ kind_salt(kind));
    GeneratedOrdering out;
    out.witness.anchor = kind;
    out.witness.shape = 0;

    switch (kind) {
        case OrderingClass::B_c: out.seq = random_Bc(m, rng); break;
        case OrderingClass::B_r: out.seq = random_Br(m, rng); break;
        case OrderingClass::B_c_rev: out.seq = reverse(random_Bc(m, rng)); break;
        case OrderingClass::B_r_rev: out.seq = reverse(random_Br(m, rng)); break;
        case OrderingClass::barB_c: out.seq = random_barBc(m, rng); break;
        case OrderingClass::barB_r:
            out.seq = apply_block_permutation(random_barBc(m, rng), BlockPermutation::reversal(m));
            break;
        case OrderingClass::barB_c_rev: out.seq = reverse(random_barBc(m, rng)); break;
        case OrderingClass::barB_r_rev:
            out.seq = reverse(apply_block_permutation(random_barBc(m, rng), BlockPermutation::reversal(m)));
            break;
        case OrderingClass::B_sp:
        case OrderingClass::barB_sp: {
            const SerialDraw draw = draw_serial(m, rng, kind == OrderingClass::barB_sp);
            out.seq = draw.seq;
            out.witness.anchor = draw.anchor;
            break;
        }
        case OrderingClass::B_spg:
        case OrderingClass::barB_spg:
        case OrderingClass::B_sg:
        case OrderingClass::barB_sg: {
            const bool bar = (kind == OrderingClass::barB_spg || kind == OrderingClass::barB_sg);
            const bool weak = (kind == OrderingClass::B_sg || kind == OrderingClass::barB_sg);
            const SerialDraw draw = draw_serial(m, rng, bar);
            std::vector<int> img(static_cast<std::size_t>(m));
            std::iota(img.begin(), img.end(), 1);
            rng.shuffle(img);
            BlockPermutation q{img};
            PivotSequence seq = apply_block_permutation(draw.seq, q.inverse());
            const long T = seq.T();
            const int d = weak ? (opts.requested_shifts >= 0 ? opts.requested_shifts
                                                             : static_cast<int>(rng.below(3)))
                               : 0;
            const int tc = opts.requested_transpositions >= 0
                               ? opts.requested_transpositions
                               : static_cast<int>(rng.below(static_cast<std::uint64_t>(2 * T + 1)));
            seq = random_transposition_walk(seq, tc, rng);
            for (int k = 0; k < d; ++k) {
                seq = rotate(seq, 1 + static_cast<long>(rng.below(static_cast<std::uint64_t>(T - 1))));
                seq = random_transposition_walk(
                    seq, static_cast<int>(rng.below(static_cast<std::uint64_t>(T + 1))), rng);
            }
            out.seq = seq;
            out.witness.anchor = draw.anchor;
            out.witness.q = img;
            out.witness.d = d;
            out.witness.shape = 2;
            out.witness.target = draw.seq;
            return out;
        }
    }
    out.witness.target = out.seq;
    return out;
}

// ---------------------------------------------------------------------------
// Recognition
// ---------------------------------------------------------------------------

RecognitionResult recognize_class(OrderingClass kind, const PivotSequence& o) {
    RecognitionResult res;
    auto structural = [&](bool ok, OrderingClass anchor) {
        res.member = ok;
        if (ok) {
            res.witness.anchor = anchor;
            res.witness.shape = 0;
            res.witness.target = o;
        }
        return res;
    };

    switch (kind) {
        case OrderingClass::B_c: return structural(parse_Bc_exact(o), kind);
        case OrderingClass::B_r: return structural(parse_Br_exact(o), kind);
        case OrderingClass::B_c_rev: return structural(parse_Bc_exact(reverse(o)), kind);
        case OrderingClass::B_r_rev: return structural(parse_Br_exact(reverse(o)), kind);
        case OrderingClass::barB_c: return structural(parse_barBc_exact(o), kind);
        case OrderingClass::barB_r: return structural(parse_barBr_exact(o), kind);
        case OrderingClass::barB_c_rev: return structural(parse_barBc_exact(reverse(o)), kind);
        case OrderingClass::barB_r_rev: return structural(parse_barBr_exact(reverse(o)), kind);
        case OrderingClass::B_sp:
            if (parse_Bc_exact(o)) return structural(true, OrderingClass::B_c);
            if (parse_Br_exact(o)) return structural(true, OrderingClass::B_r);
            if (parse_Bc_exact(reverse(o))) return structural(true, OrderingClass::B_c_rev);
            if (parse_Br_exact(reverse(o))) return structural(true, OrderingClass::B_r_rev);
            return res;
        case OrderingClass::barB_sp:
            if (parse_barBc_exact(o)) return structural(true, OrderingClass::barB_c);
            if (parse_barBr_exact(o)) return structural(true, OrderingClass::barB_r);
            if (parse_barBc_exact(reverse(o))) return structural(true, OrderingClass::barB_c_rev);
            if (parse_barBr_exact(reverse(o))) return structural(true, OrderingClass::barB_r_rev);
            return res;
        case OrderingClass::B_spg:
        case OrderingClass::barB_spg: {
            const bool bar = (kind == OrderingClass::barB_spg);
            if (bar ? !(o.is_quasi_cyclic() && o.T() < 2 * o.M()) : !o.is_cyclic()) return res;
            if (o.m > 5)
                throw UnsupportedSize("recognize_class: relabeling search supported for m <= 5");
            std::vector<int> q_image;
            OrderingClass anchor = kind;
            PivotSequence target;
            if (relabel_match(o, bar, &q_image, &anchor, &target)) {
                res.member = true;
                res.witness.anchor = anchor;
                res.witness.q = q_image;
                res.witness.d = 0;
                res.witness.shape = 2;
                res.witness.target = target;
            }
            return res;
        }
        case OrderingClass::B_sg:
        case OrderingClass::barB_sg: {
            const bool bar = (kind == OrderingClass::barB_sg);
            if (bar ? !(o.is_quasi_cyclic() && o.T() < 2 * o.M()) : !o.is_cyclic()) return res;
            if (o.m > 6)
                throw UnsupportedSize("recognize_class: weak-equivalence search supported for m <= 5");
            const bool best_effort = (o.m == 6);
            std::vector<int> q_image;
            OrderingClass anchor = kind;
            PivotSequence target;
            const auto accept = [&](const PivotSequence& rep) {
                return relabel_match(rep, bar, &q_image, &anchor, &target);
            };
            WeakSearch search =
                weak_bfs(o, accept, best_effort ? kBestEffortClassCap : kClassCap,
                         best_effort ? kBestEffortLeafBudget : kLeafBudget);
            if (!search.found) {
                if (search.capped || best_effort)
                    throw UnsupportedSize(
                        "recognize_class: weak-equivalence search budget exceeded");
                return res;
            }
            res.member = true;
            res.witness.anchor = anchor;
            res.witness.q = q_image;
            res.witness.d = search.nodes[static_cast<std::size_t>(search.hit)].depth;
            res.witness.shape = 2;
            res.witness.target = target;
            res.witness.chain = build_chain(search, search.hit);
            return res;
        }
    }
    return res;
}

} // namespace bjlab
