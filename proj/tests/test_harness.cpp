// SPDX-License-Identifier: Apache-2.0
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "bjlab/bounds.hpp"
#include "bjlab/errors.hpp"
#include "bjlab/harness.hpp"
#include "bjlab/linalg.hpp"
#include "bjlab/matrix.hpp"
#include "bjlab/orderings.hpp"
#include "bjlab/rng.hpp"
#include "doctest.h"
#include "json.hpp"
#include "oracles.hpp"

using namespace bjlab;
namespace fs = std::filesystem;
using njson = nlohmann::json;

namespace {

fs::path temp_dir() {
    const fs::path dir = fs::temp_directory_path() / "bjlab_harness_tests";
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p);
    REQUIRE(bool(f));
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

double block_sigma_min(const DenseMatrix& U, int ni) {
    SymmetricMatrix G(static_cast<std::size_t>(ni));
    for (int r = 0; r < ni; ++r)
        for (int c = r; c < ni; ++c) {
            double acc = 0.0;
            for (int k = 0; k < ni; ++k)
                acc += U(static_cast<std::size_t>(k), static_cast<std::size_t>(r)) *
                       U(static_cast<std::size_t>(k), static_cast<std::size_t>(c));
            G.set(static_cast<std::size_t>(r), static_cast<std::size_t>(c), acc);
        }
    const std::vector<double> ev = oracles::eigenvalues(G);
    return std::sqrt(std::max(0.0, ev.front()));
}

} // namespace

TEST_SUITE("harness") {

TEST_CASE("strategy specs parse in both forms") {
    const StrategySpec cs = parse_strategy_spec("  class:B_sg m=5 seed=11 d=2  ");
    CHECK(cs.is_class);
    CHECK(cs.cls == OrderingClass::B_sg);
    CHECK(cs.m == 5);
    CHECK(cs.seed == 11);
    CHECK(cs.shifts == 2);
    CHECK(cs.text == "class:B_sg m=5 seed=11 d=2");

    const StrategySpec defaults = parse_strategy_spec("class:B_c m=4");
    CHECK(defaults.seed == 0);
    CHECK(defaults.shifts == -1);

    const StrategySpec ps = parse_strategy_spec("pairs:(1,2), (1,3),(2,3)");
    CHECK(!ps.is_class);
    REQUIRE(ps.pairs.size() == 3);
    CHECK(ps.pairs[0] == PivotPair{1, 2});
    CHECK(ps.pairs[2] == PivotPair{2, 3});

    CHECK_THROWS_AS(parse_strategy_spec("serial"), InvalidArgument);
    CHECK_THROWS_AS(parse_strategy_spec("class:"), InvalidArgument);
    CHECK_THROWS_AS(parse_strategy_spec("class:NoSuch m=3"), InvalidArgument);
    CHECK_THROWS_AS(parse_strategy_spec("class:B_c"), InvalidArgument);
    CHECK_THROWS_AS(parse_strategy_spec("class:B_c m=1"), InvalidArgument);
    CHECK_THROWS_AS(parse_strategy_spec("class:B_c m=3 q=1"), InvalidArgument);
    CHECK_THROWS_AS(parse_strategy_spec("pairs:"), InvalidArgument);
    CHECK_THROWS_AS(parse_strategy_spec("pairs:(1,2)(1,3"), InvalidArgument);
    CHECK_THROWS_AS(parse_strategy_spec("pairs:1,2"), InvalidArgument);
}

TEST_CASE("partition specs parse with and without the prefix") {
    const Partition a = parse_partition_spec("pi:2, 2,2");
    const Partition b = parse_partition_spec("2,2,2");
    CHECK(a.sizes() == b.sizes());
    CHECK(a.n() == 6);
    CHECK_THROWS_AS(parse_partition_spec(""), InvalidArgument);
    CHECK_THROWS_AS(parse_partition_spec("pi:"), InvalidArgument);
    CHECK_THROWS_AS(parse_partition_spec("2,,2"), InvalidArgument);
    CHECK_THROWS_AS(parse_partition_spec("2,x"), InvalidArgument);
    CHECK_THROWS_AS(parse_partition_spec("2,0,2"), InvalidArgument);
}

TEST_CASE("strategies resolve to concrete sequences") {
    const ResolvedStrategy rs = resolve_strategy(parse_strategy_spec("class:B_c m=4 seed=7"), 4);
    CHECK(rs.has_witness);
    CHECK(rs.cls == OrderingClass::B_c);
    CHECK(rs.sequence.m == 4);
    CHECK(recognize_class(OrderingClass::B_c, rs.sequence).member);

    // The class form is deterministic in (kind, m, seed).
    const ResolvedStrategy again = resolve_strategy(parse_strategy_spec("class:B_c m=4 seed=7"), 4);
    CHECK(again.sequence.pairs == rs.sequence.pairs);

    CHECK_THROWS_AS(resolve_strategy(parse_strategy_spec("class:B_c m=4 seed=7"), 5),
                    InvalidArgument);

    const ResolvedStrategy pairs =
        resolve_strategy(parse_strategy_spec("pairs:(1,2),(1,3),(2,3)"), 3);
    CHECK(!pairs.has_witness);
    CHECK(pairs.sequence.m == 3);
    CHECK(pairs.sequence.is_covering());

    // Without an expected block count, m is inferred from the largest index.
    const ResolvedStrategy inferred =
        resolve_strategy(parse_strategy_spec("pairs:(1,4),(2,3)"), 0);
    CHECK(inferred.sequence.m == 4);

    const GenerateOptions opts{2, -1};
    const GeneratedOrdering g = generate_class(OrderingClass::B_sg, 4, 3, opts);
    const ResolvedStrategy shifted =
        resolve_strategy(parse_strategy_spec("class:B_sg m=4 seed=3 d=2"), 4);
    CHECK(shifted.witness.d == g.witness.d);
    CHECK(shifted.witness.d == 2);
}

TEST_CASE("format_double round-trips doubles through text") {
    const std::vector<double> samples = {0.0,
                                         1.0,
                                         -1.0,
                                         1.0 / 3.0,
                                         675.0 / 676.0,
                                         3.141592653589793,
                                         1e-300,
                                         -2.2250738585072014e-308,
                                         1.7976931348623157e308,
                                         0.1,
                                         -12345.678901234567};
    for (double v : samples) {
        const std::string s = format_double(v);
        CHECK(std::strtod(s.c_str(), nullptr) == v);
    }
    CHECK(format_double(0.0) == "0");
    CHECK(format_double(-0.0) == "-0");
    CHECK(format_double(1.0) == "1");
    CHECK(format_double(0.5) == "0.5");
}

TEST_CASE("matrix files round-trip exactly") {
    Rng rng(7);
    const SymmetricMatrix A = random_symmetric(5, rng);
    const fs::path path = temp_dir() / "roundtrip.mat";
    write_matrix_file(path.string(), A);
    const SymmetricMatrix B = read_matrix_file(path.string());
    REQUIRE(B.order() == A.order());
    for (std::size_t r = 0; r < 5; ++r)
        for (std::size_t c = 0; c < 5; ++c) CHECK(B(r, c) == A(r, c));

    CHECK_THROWS_AS(read_matrix_file((temp_dir() / "missing.mat").string()), IoError);

    const fs::path bad_order = temp_dir() / "bad_order.mat";
    { std::ofstream f(bad_order); f << "x\n"; }
    CHECK_THROWS_AS(read_matrix_file(bad_order.string()), IoError);

    const fs::path truncated = temp_dir() / "truncated.mat";
    { std::ofstream f(truncated); f << "2\n1 0\n"; }
    CHECK_THROWS_AS(read_matrix_file(truncated.string()), IoError);

    const fs::path asym = temp_dir() / "asym.mat";
    { std::ofstream f(asym); f << "2\n1 0.5\n0.25 1\n"; }
    CHECK_THROWS_AS(read_matrix_file(asym.string()), IoError);
}

TEST_CASE("matrix sources are deterministic and honor the generator") {
    MatrixSource src;
    src.generator = "symmetric";
    src.n = 6;
    src.seed = 42;
    const SymmetricMatrix A = make_matrix(src);
    const SymmetricMatrix B = make_matrix(src);
    CHECK(max_abs_diff(A.to_dense(), B.to_dense()) == 0.0);
    const SymmetricMatrix C = make_matrix(src, 1);
    CHECK(max_abs_diff(A.to_dense(), C.to_dense()) > 0.0);

    src.generator = "spd";
    const SymmetricMatrix S = make_matrix(src);
    CHECK(oracles::eigenvalues(S).front() > 0.0);

    src.generator = "diagonal";
    const SymmetricMatrix D = make_matrix(src);
    CHECK(off_norm(D) == 0.0);

    // A file path wins over the generator settings.
    const fs::path path = temp_dir() / "source.mat";
    write_matrix_file(path.string(), SymmetricMatrix::identity(3));
    src.file = path.string();
    const SymmetricMatrix F = make_matrix(src);
    CHECK(F.order() == 3);
    CHECK(F(0, 0) == 1.0);

    src.file.clear();
    src.generator = "hilbert";
    CHECK_THROWS_AS(make_matrix(src), InvalidArgument);
    src.generator = "symmetric";
    src.n = 0;
    CHECK_THROWS_AS(make_matrix(src), InvalidArgument);
}

TEST_CASE("mode strings round-trip") {
    for (const char* s : {"always", "adaptive", "never"})
        CHECK(std::string(to_string(parse_ubc_mode(s))) == s);
    for (const char* s : {"none", "nonincreasing", "nondecreasing"})
        CHECK(std::string(to_string(parse_eig_order(s))) == s);
    CHECK_THROWS_AS(parse_ubc_mode("sometimes"), InvalidArgument);
    CHECK_THROWS_AS(parse_eig_order("sorted"), InvalidArgument);
}

TEST_CASE("worker thread cap honors the environment variable") {
    char* saved = std::getenv("BJLAB_THREADS");
    const std::string saved_value = saved ? saved : "";

    setenv("BJLAB_THREADS", "2", 1);
    CHECK(worker_thread_cap(8) == 2);
    CHECK(worker_thread_cap(1) == 1);
    setenv("BJLAB_THREADS", "0", 1);
    CHECK(worker_thread_cap(8) == 1);
    unsetenv("BJLAB_THREADS");
    CHECK(worker_thread_cap(1) == 1);
    CHECK(worker_thread_cap(4) >= 1);
    CHECK(worker_thread_cap(4) <= 4);

    if (saved)
        setenv("BJLAB_THREADS", saved_value.c_str(), 1);
}

TEST_CASE("sampled transformations satisfy the conditioning floor") {
    Rng rng(3);
    for (const auto& shape : std::vector<std::pair<int, int>>{{1, 1}, {2, 2}, {2, 3}, {3, 1}}) {
        const int ni = shape.first, nj = shape.second;
        for (double rho : {0.5, 1.0}) {
            for (int s = 0; s < 10; ++s) {
                const DenseMatrix U = sample_ubc_factor(ni, nj, rho, rng);
                REQUIRE(U.rows() == static_cast<std::size_t>(ni + nj));
                CHECK(max_abs_diff(multiply_tn(U, U),
                                   DenseMatrix::identity(static_cast<std::size_t>(ni + nj))) <=
                      1e-12);
                CHECK(block_sigma_min(U, ni) >= rho * gamma_ij(ni, nj) - 1e-12);
            }
        }
    }
}

TEST_CASE("bounds command prints the table and certifies strategies") {
    BoundsOptions opt;
    opt.partition = "2,2,2";
    opt.rho = 1.0;
    std::ostringstream out, err;
    CHECK(cmd_bounds(opt, out, err) == 0);
    CHECK(err.str().empty());
    CHECK(out.str().find("partition: 2,2,2") != std::string::npos);
    CHECK(out.str().find("effective eta:") != std::string::npos);
    CHECK(out.str().find("eta_tilde:") != std::string::npos);

    opt.strategy = "class:B_c m=3 seed=1";
    std::ostringstream out2, err2;
    CHECK(cmd_bounds(opt, out2, err2) == 0);
    CHECK(out2.str().find("certified: class=B_c sweeps=1") != std::string::npos);

    BoundsOptions bad;
    bad.partition = "2,zero";
    std::ostringstream out3, err3;
    CHECK(cmd_bounds(bad, out3, err3) == 1);
    CHECK(err3.str().find("error:") != std::string::npos);
}

TEST_CASE("classify command reports memberships") {
    ClassifyOptions opt;
    opt.strategy = "class:B_c m=4 seed=7";
    std::ostringstream out, err;
    CHECK(cmd_classify(opt, out, err) == 0);
    const std::string text = out.str();
    CHECK(text.find("memberships:") != std::string::npos);
    CHECK(text.find("B_c: member") != std::string::npos);
    CHECK(text.find("ordering matrix:") != std::string::npos);

    ClassifyOptions one;
    one.strategy = "pairs:(1,2),(1,3),(2,3)";
    one.requested_class = "B_c";
    std::ostringstream out2, err2;
    CHECK(cmd_classify(one, out2, err2) == 0);
    CHECK(out2.str().find("B_c: member") != std::string::npos);

    ClassifyOptions partial;
    partial.strategy = "pairs:(1,2),(1,3)";
    std::ostringstream out3, err3;
    CHECK(cmd_classify(partial, out3, err3) == 0);
    CHECK(out3.str().find("not a pivot strategy") != std::string::npos);

    ClassifyOptions unknown;
    unknown.strategy = "class:B_c m=3 seed=1";
    unknown.requested_class = "B_q";
    std::ostringstream out4, err4;
    CHECK(cmd_classify(unknown, out4, err4) == 1);
    CHECK(err4.str().find("error:") != std::string::npos);
}

TEST_CASE("run command emits reproducible JSON and certifies the sweep bound") {
    RunOptions opt;
    opt.matrix.generator = "symmetric";
    opt.matrix.n = 6;
    opt.matrix.seed = 5;
    opt.partition = "2,2,2";
    opt.strategy = "class:B_c m=3 seed=2";
    opt.check_bounds = true;
    opt.repetitions = 2;

    std::ostringstream out1, err1, out2, err2;
    CHECK(cmd_run(opt, out1, err1) == 0);
    CHECK(cmd_run(opt, out2, err2) == 0);
    CHECK(out1.str() == out2.str());
    CHECK(err1.str().empty());

    const njson j = njson::parse(out1.str());
    CHECK(j["version"] == "bjlab-run-v1");
    CHECK(j["config"]["strategy"] == "class:B_c m=3 seed=2");
    CHECK(j["config"]["partition"] == std::vector<int>{2, 2, 2});
    CHECK(j["bound"]["class"] == "B_c");
    CHECK(j["bound"]["sweeps"] == 1);
    CHECK(j["aggregate"]["all_converged"] == true);
    CHECK(j["aggregate"]["bound_checked"] == true);
    CHECK(j["aggregate"]["total_violations"] == 0);
    CHECK(j["aggregate"]["max_window_ratio"].get<double>() <
          effective_eta(Partition({2, 2, 2}), 1.0) + 1e-12);
    REQUIRE(j["repetitions"].size() == 2);
    for (const auto& rep : j["repetitions"]) {
        CHECK(rep["converged"] == true);
        CHECK(rep["eigenvalues"].size() == 6);
    }
}

TEST_CASE("run command writes per-repetition artifacts") {
    const fs::path dir = temp_dir() / "run_artifacts";
    fs::remove_all(dir);

    RunOptions opt;
    opt.matrix.generator = "symmetric";
    opt.matrix.n = 4;
    opt.matrix.seed = 3;
    opt.partition = "2,2";
    opt.strategy = "pairs:(1,2)";
    opt.out_dir = dir.string();

    std::ostringstream out, err;
    CHECK(cmd_run(opt, out, err) == 0);
    CHECK(slurp(dir / "rep0_steps.csv").rfind("# bjlab-steps-v1", 0) == 0);
    CHECK(slurp(dir / "rep0_sweeps.csv").rfind("# bjlab-sweeps-v1", 0) == 0);
    CHECK(njson::parse(slurp(dir / "rep0_summary.json"))["converged"] == true);
    CHECK(njson::parse(slurp(dir / "summary.json"))["version"] == "bjlab-run-v1");
}

TEST_CASE("run command distinguishes failure modes by exit code") {
    RunOptions bad;
    bad.matrix.generator = "symmetric";
    bad.matrix.n = 6;
    bad.partition = "2,2,3";
    bad.strategy = "class:B_c m=3 seed=1";
    std::ostringstream out, err;
    CHECK(cmd_run(bad, out, err) == 1);
    CHECK(err.str().find("error:") != std::string::npos);

    RunOptions capped;
    capped.matrix.generator = "symmetric";
    capped.matrix.n = 6;
    capped.matrix.seed = 5;
    capped.partition = "2,2,2";
    capped.strategy = "class:B_c m=3 seed=2";
    capped.solver.max_sweeps = 1;
    capped.solver.tol = 1e-300;
    std::ostringstream out2, err2;
    CHECK(cmd_run(capped, out2, err2) == 3);
    const njson j = njson::parse(out2.str());
    CHECK(j["aggregate"]["all_converged"] == false);
}

TEST_CASE("run options load from JSON configs") {
    const fs::path cfg = temp_dir() / "run_config.json";
    {
        std::ofstream f(cfg);
        f << R"({
            "matrix": {"generator": "symmetric", "n": 6, "seed": 9, "scale": 2.0},
            "partition": [2, 2, 2],
            "strategy": "class:B_c m=3 seed=4",
            "solver": {"rho": 0.5, "ubc": "adaptive", "eig_order": "nonincreasing",
                       "tol": 1e-9, "max_sweeps": 32, "adaptive_switch": 0.05},
            "check_bounds": true,
            "repetitions": 3
        })";
    }
    const RunOptions o = run_options_from_json(cfg.string());
    CHECK(o.matrix.generator == "symmetric");
    CHECK(o.matrix.n == 6);
    CHECK(o.matrix.seed == 9);
    CHECK(o.matrix.scale == 2.0);
    CHECK(o.partition == "2,2,2");
    CHECK(o.strategy == "class:B_c m=3 seed=4");
    CHECK(o.solver.rho == 0.5);
    CHECK(o.solver.ubc == UbcMode::Adaptive);
    CHECK(o.solver.eig_order == EigOrder::Nonincreasing);
    CHECK(o.solver.tol == 1e-9);
    CHECK(o.solver.max_sweeps == 32);
    CHECK(o.check_bounds);
    CHECK(o.repetitions == 3);

    std::ostringstream out, err;
    CHECK(cmd_run(o, out, err) == 0);

    CHECK_THROWS_AS(run_options_from_json((temp_dir() / "missing.json").string()), IoError);
    const fs::path broken = temp_dir() / "broken.json";
    { std::ofstream f(broken); f << "{ not json"; }
    CHECK_THROWS_AS(run_options_from_json(broken.string()), IoError);
}

TEST_CASE("operator norm command stays below the certified bound") {
    OperatorNormOptions opt;
    opt.partition = "1,1,1";
    opt.strategy = "class:B_c m=3 seed=1";
    opt.samples = 20;
    opt.seed = 2;
    std::ostringstream out, err;
    CHECK(cmd_operator_norm(opt, out, err) == 0);
    const njson j = njson::parse(out.str());
    CHECK(j["version"] == "bjlab-opnorm-v1");
    CHECK(j["class"] == "B_c");
    CHECK(j["violations"] == 0);
    CHECK(j["max_norm"].get<double>() < 1.0);
    CHECK(j["max_norm"].get<double>() <= j["mu"].get<double>() + 1e-9);
    CHECK(j["margin"].get<double>() >= -1e-9);

    OperatorNormOptions bad = opt;
    bad.samples = 0;
    std::ostringstream out2, err2;
    CHECK(cmd_operator_norm(bad, out2, err2) == 1);
}

TEST_CASE("jjacobi command solves the definite pencil end to end") {
    JJacobiOptions opt;
    opt.matrix.generator = "spd";
    opt.matrix.n = 4;
    opt.matrix.seed = 9;
    opt.partition = "2,2";
    opt.strategy = "pairs:(1,2)";
    opt.nu = 2;

    std::ostringstream out1, err1, out2, err2;
    CHECK(cmd_jjacobi(opt, out1, err1) == 0);
    CHECK(cmd_jjacobi(opt, out2, err2) == 0);
    CHECK(out1.str() == out2.str());

    const njson j = njson::parse(out1.str());
    CHECK(j["version"] == "bjlab-jjacobi-v1");
    CHECK(j["converged"] == true);
    CHECK(j["assumptions"]["fjf_deviation"].get<double>() <= 1e-9);
    CHECK(j["assumptions"]["norm_growth_flag"] == false);
    CHECK(j["pencil_eigenvalues"].size() == 4);
    CHECK(j["diagonal"].size() == 4);
    for (const auto& d : j["diagonal"]) CHECK(d.get<double>() > 0.0);

    // An indefinite input is an input-validation failure, not non-convergence.
    JJacobiOptions indef = opt;
    indef.matrix.generator = "diagonal";
    std::ostringstream out3, err3;
    CHECK(cmd_jjacobi(indef, out3, err3) == 1);
    CHECK(err3.str().find("error:") != std::string::npos);
}

TEST_CASE("jjacobi options load from JSON configs") {
    const fs::path cfg = temp_dir() / "jjacobi_config.json";
    {
        std::ofstream f(cfg);
        f << R"json({
            "matrix": {"n": 4, "seed": 9},
            "partition": "2,2",
            "strategy": "pairs:(1,2)",
            "nu": 2,
            "solver": {"tol": 1e-11, "max_sweeps": 30}
        })json";
    }
    const JJacobiOptions o = jjacobi_options_from_json(cfg.string());
    CHECK(o.matrix.generator == "spd");
    CHECK(o.matrix.n == 4);
    CHECK(o.nu == 2);
    CHECK(o.config.tol == 1e-11);
    CHECK(o.config.max_sweeps == 30);
    std::ostringstream out, err;
    CHECK(cmd_jjacobi(o, out, err) == 0);
    const fs::path artifacts = temp_dir() / "jjacobi_artifacts";
    fs::remove_all(artifacts);
    JJacobiOptions with_dir = o;
    with_dir.out_dir = artifacts.string();
    std::ostringstream out2, err2;
    CHECK(cmd_jjacobi(with_dir, out2, err2) == 0);
    CHECK(slurp(artifacts / "jjacobi_steps.csv").rfind("# bjlab-jjacobi-steps-v1", 0) == 0);
    CHECK(slurp(artifacts / "jjacobi_sweeps.csv").rfind("# bjlab-jjacobi-sweeps-v1", 0) == 0);
    CHECK(njson::parse(slurp(artifacts / "jjacobi_summary.json"))["converged"] == true);
}

} // TEST_SUITE
