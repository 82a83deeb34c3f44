// SPDX-License-Identifier: Apache-2.0
#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "bjlab/harness.hpp"

int main(int argc, char** argv) {
    CLI::App app{"bjlab: block Jacobi methods for symmetric matrices under serial pivot strategies"};
    app.require_subcommand(1);
    int exit_code = 0;

    // ---- run ----
    auto* run = app.add_subcommand("run", "run the block Jacobi solver and export traces");
    struct {
        std::string config, matrix, generator{"symmetric"}, pi, strategy, ubc{"always"},
            eig{"none"}, out_dir;
        int n{0}, max_sweeps{64}, reps{1};
        std::uint64_t seed{1};
        double scale{1.0}, rho{1.0}, tol{1e-10}, adaptive{1e-2};
        bool check_bounds{false};
    } R;
    run->add_option("--config", R.config, "JSON config file (flags override it)");
    run->add_option("--matrix", R.matrix, "matrix file (first line n, then n rows)");
    run->add_option("--generator", R.generator, "matrix generator: symmetric|spd|diagonal");
    run->add_option("--n", R.n, "order for generated matrices");
    run->add_option("--seed", R.seed, "seed for generated matrices");
    run->add_option("--scale", R.scale, "scale for generated matrices");
    run->add_option("--pi", R.pi, "partition spec, e.g. 2,2,2,2");
    run->add_option("--strategy", R.strategy, "strategy spec, e.g. \"class:B_c m=4 seed=7\"");
    run->add_option("--rho", R.rho, "UBC parameter in (0,1]");
    run->add_option("--ubc", R.ubc, "UBC mode: always|adaptive|never");
    run->add_option("--eig-order", R.eig, "kernel ordering: none|nonincreasing|nondecreasing");
    run->add_option("--tol", R.tol, "stop when S(A) <= tol*||A||_F");
    run->add_option("--max-sweeps", R.max_sweeps, "sweep cap");
    run->add_option("--adaptive-switch", R.adaptive, "adaptive UBC threshold");
    run->add_option("--out-dir", R.out_dir, "directory for CSV/JSON exports");
    run->add_flag("--check-bounds", R.check_bounds, "verify sweep ratios against the certified bound");
    run->add_option("--reps", R.reps, "repetition count (seeds seed+0..reps-1)");
    run->callback([&] {
        bjlab::RunOptions opt;
        if (!R.config.empty()) opt = bjlab::run_options_from_json(R.config);
        if (run->count("--matrix")) opt.matrix.file = R.matrix;
        if (run->count("--generator")) opt.matrix.generator = R.generator;
        if (run->count("--n")) opt.matrix.n = R.n;
        if (run->count("--seed")) opt.matrix.seed = R.seed;
        if (run->count("--scale")) opt.matrix.scale = R.scale;
        if (run->count("--pi")) opt.partition = R.pi;
        if (run->count("--strategy")) opt.strategy = R.strategy;
        if (run->count("--rho")) opt.solver.rho = R.rho;
        if (run->count("--ubc")) opt.solver.ubc = bjlab::parse_ubc_mode(R.ubc);
        if (run->count("--eig-order")) opt.solver.eig_order = bjlab::parse_eig_order(R.eig);
        if (run->count("--tol")) opt.solver.tol = R.tol;
        if (run->count("--max-sweeps")) opt.solver.max_sweeps = R.max_sweeps;
        if (run->count("--adaptive-switch")) opt.solver.adaptive_switch = R.adaptive;
        if (run->count("--out-dir")) opt.out_dir = R.out_dir;
        if (run->count("--check-bounds")) opt.check_bounds = R.check_bounds;
        if (run->count("--reps")) opt.repetitions = R.reps;
        exit_code = bjlab::cmd_run(opt, std::cout, std::cerr);
    });

    // ---- operator-norm ----
    auto* opn = app.add_subcommand("operator-norm", "sample UBC operators and report norms vs mu");
    struct {
        std::string pi, strategy;
        double rho{1.0};
        int samples{200};
        std::uint64_t seed{1};
    } N;
    opn->add_option("--pi", N.pi, "partition spec")->required();
    opn->add_option("--strategy", N.strategy, "strategy spec")->required();
    opn->add_option("--rho", N.rho, "UBC parameter in (0,1]");
    opn->add_option("--samples", N.samples, "number of sampled operators");
    opn->add_option("--seed", N.seed, "sampling seed");
    opn->callback([&] {
        bjlab::OperatorNormOptions opt;
        opt.partition = N.pi;
        opt.strategy = N.strategy;
        opt.rho = N.rho;
        opt.samples = N.samples;
        opt.seed = N.seed;
        exit_code = bjlab::cmd_operator_norm(opt, std::cout, std::cerr);
    });

    // ---- classify ----
    auto* cls = app.add_subcommand("classify", "report class memberships of a pivot sequence");
    struct {
        std::string strategy, requested;
    } C;
    cls->add_option("--strategy", C.strategy, "strategy spec")->required();
    cls->add_option("--class", C.requested, "check only this class (exit 1 when m unsupported)");
    cls->callback([&] {
        bjlab::ClassifyOptions opt;
        opt.strategy = C.strategy;
        opt.requested_class = C.requested;
        exit_code = bjlab::cmd_classify(opt, std::cout, std::cerr);
    });

    // ---- jjacobi ----
    auto* jj = app.add_subcommand("jjacobi", "run the block J-Jacobi solver for the pencil (A, J)");
    struct {
        std::string config, matrix, generator{"spd"}, pi, strategy, out_dir;
        int n{0}, nu{0}, max_sweeps{40};
        std::uint64_t seed{1};
        double scale{1.0}, tol{1e-12};
    } J;
    jj->add_option("--config", J.config, "JSON config file (flags override it)");
    jj->add_option("--matrix", J.matrix, "matrix file (must be SPD)");
    jj->add_option("--generator", J.generator, "matrix generator: spd|symmetric|diagonal");
    jj->add_option("--n", J.n, "order for generated matrices");
    jj->add_option("--seed", J.seed, "seed for generated matrices");
    jj->add_option("--scale", J.scale, "scale for generated matrices");
    jj->add_option("--pi", J.pi, "partition spec; must refine (nu, n-nu)");
    jj->add_option("--nu", J.nu, "signature split: J = diag(I_nu, -I_(n-nu))");
    jj->add_option("--strategy", J.strategy, "strategy spec");
    jj->add_option("--tol", J.tol, "stop when S(A) <= tol*||A||_F (current norm)");
    jj->add_option("--max-sweeps", J.max_sweeps, "sweep cap");
    jj->add_option("--out-dir", J.out_dir, "directory for CSV/JSON exports");
    jj->callback([&] {
        bjlab::JJacobiOptions opt;
        opt.matrix.generator = "spd";
        if (!J.config.empty()) opt = bjlab::jjacobi_options_from_json(J.config);
        if (jj->count("--matrix")) opt.matrix.file = J.matrix;
        if (jj->count("--generator")) opt.matrix.generator = J.generator;
        if (jj->count("--n")) opt.matrix.n = J.n;
        if (jj->count("--seed")) opt.matrix.seed = J.seed;
        if (jj->count("--scale")) opt.matrix.scale = J.scale;
        if (jj->count("--pi")) opt.partition = J.pi;
        if (jj->count("--nu")) opt.nu = J.nu;
        if (jj->count("--strategy")) opt.strategy = J.strategy;
        if (jj->count("--tol")) opt.config.tol = J.tol;
        if (jj->count("--max-sweeps")) opt.config.max_sweeps = J.max_sweeps;
        if (jj->count("--out-dir")) opt.out_dir = J.out_dir;
        exit_code = bjlab::cmd_jjacobi(opt, std::cout, std::cerr);
    });

    // ---- bounds ----
    auto* bnd = app.add_subcommand("bounds", "print the convergence-constant table for a partition");
    struct {
        std::string pi, strategy;
        double rho{1.0};
    } B;
    bnd->add_option("--pi", B.pi, "partition spec")->required();
    bnd->add_option("--rho", B.rho, "UBC parameter in (0,1]");
    bnd->add_option("--strategy", B.strategy, "also certify this strategy's sweep bound");
    bnd->callback([&] {
        bjlab::BoundsOptions opt;
        opt.partition = B.pi;
        opt.rho = B.rho;
        opt.strategy = B.strategy;
        exit_code = bjlab::cmd_bounds(opt, std::cout, std::cerr);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return exit_code;
}
