// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "bjlab/block_jacobi.hpp"
#include "bjlab/bounds.hpp"
#include "bjlab/jjacobi.hpp"
#include "bjlab/orderings.hpp"
#include "bjlab/partition.hpp"
#include "bjlab/rng.hpp"

namespace bjlab {

// ---------------------------------------------------------------------------
// Specs and parsing
// ---------------------------------------------------------------------------

/// Strategy spec: "class:B_c m=4 seed=7 [d=1]" or "pairs:(1,2),(1,3),(2,3)".
struct StrategySpec {
    bool is_class = false;
    OrderingClass cls = OrderingClass::B_c;
    int m = 0;
    std::uint64_t seed = 0;
    int shifts = -1;                ///< optional d= parameter for *_sg classes
    std::vector<PivotPair> pairs;   ///< explicit list form
    std::string text;               ///< original text, echoed in summaries
};

StrategySpec parse_strategy_spec(const std::string& text); ///< throws InvalidArgument

/// Partition spec: "pi:2,2,2,2" or plain "2,2,2,2".
Partition parse_partition_spec(const std::string& text); ///< throws InvalidArgument

struct ResolvedStrategy {
    PivotSequence sequence;
    bool has_witness = false; ///< true for class-form strategies (witness below is valid)
    OrderingClass cls = OrderingClass::B_c;
    ClassWitness witness;
};

/// Turn a strategy string into a concrete sequence; m_expected = partition block count.
ResolvedStrategy resolve_strategy(const StrategySpec& spec, int m_expected);

// ---------------------------------------------------------------------------
// Matrix sources and IO
// ---------------------------------------------------------------------------

/// "file" wins when nonempty; otherwise a seeded generator is used.
struct MatrixSource {
    std::string file;
    std::string generator = "symmetric"; ///< symmetric | spd | diagonal
    int n = 0;
    std::uint64_t seed = 1;
    double scale = 1.0;
};

/// First line "n", then n rows of n decimals; symmetry checked to 1e-12.
SymmetricMatrix read_matrix_file(const std::string& path); ///< throws IoError / InvalidArgument
void write_matrix_file(const std::string& path, const SymmetricMatrix& A);

/// Realize a source; `seed_offset` shifts the seed for repetition campaigns.
SymmetricMatrix make_matrix(const MatrixSource& src, std::uint64_t seed_offset = 0);

/// Shortest-deterministic decimal used in all CSV output (round-trips doubles).
std::string format_double(double v);

UbcMode parse_ubc_mode(const std::string& s);   ///< "always" | "adaptive" | "never"
EigOrder parse_eig_order(const std::string& s); ///< "none" | "nonincreasing" | "nondecreasing"
const char* to_string(UbcMode m);
const char* to_string(EigOrder o);

/// Worker count for repetition fan-out: BJLAB_THREADS if set, else hardware
/// concurrency, capped by `jobs` and floored at 1.
int worker_thread_cap(int jobs);

/**
 * Draw a random orthogonal transformation of order ni+nj whose leading ni x ni
 * block satisfies the sigma_min floor rho * gamma_ij(ni, nj), by column
 * pivoting a Haar-ish random orthogonal matrix.
 */
DenseMatrix sample_ubc_factor(int ni, int nj, double rho, Rng& rng);

// ---------------------------------------------------------------------------
// Commands (return process exit codes: 0 ok, 1 parse/IO, 2 bound violation,
// 3 non-convergence)
// ---------------------------------------------------------------------------

struct RunOptions {
    MatrixSource matrix;
    std::string partition; ///< partition spec text
    std::string strategy;  ///< strategy spec text
    SolverConfig solver;
    std::string out_dir;   ///< empty: no files, summary JSON to stdout only
    bool check_bounds = false;
    int repetitions = 1;
};

/// Load options from a JSON config file (see README for the schema).
RunOptions run_options_from_json(const std::string& path);

int cmd_run(const RunOptions& opt, std::ostream& out, std::ostream& err);

struct OperatorNormOptions {
    std::string partition;
    std::string strategy;
    double rho = 1.0;
    int samples = 200;
    std::uint64_t seed = 1;
};

int cmd_operator_norm(const OperatorNormOptions& opt, std::ostream& out, std::ostream& err);

struct ClassifyOptions {
    std::string strategy;
    std::string requested_class; ///< empty: report membership for every class
};

int cmd_classify(const ClassifyOptions& opt, std::ostream& out, std::ostream& err);

struct JJacobiOptions {
    MatrixSource matrix; ///< generator defaults to "spd"
    std::string partition;
    std::string strategy;
    int nu = 0;
    JJacobiConfig config;
    std::string out_dir;
};

JJacobiOptions jjacobi_options_from_json(const std::string& path);

int cmd_jjacobi(const JJacobiOptions& opt, std::ostream& out, std::ostream& err);

struct BoundsOptions {
    std::string partition;
    double rho = 1.0;
    std::string strategy; ///< optional: also certify this strategy's sweep bound
};

int cmd_bounds(const BoundsOptions& opt, std::ostream& out, std::ostream& err);

} // namespace bjlab
