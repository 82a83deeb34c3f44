// SPDX-License-Identifier: Apache-2.0
#include "bjlab/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "bjlab/annihilator.hpp"

namespace bjlab {

namespace {

using ojson = nlohmann::ordered_json;
namespace fs = std::filesystem;

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

long parse_long(const std::string& s, const std::string& what) {
    std::size_t pos = 0;
    long v = 0;
    try {
        v = std::stol(s, &pos);
    } catch (const std::exception&) {
        throw InvalidArgument("cannot parse " + what + " from '" + s + "'");
    }
    if (pos != s.size()) throw InvalidArgument("trailing junk in " + what + ": '" + s + "'");
    return v;
}

std::string pairs_to_string(const std::vector<PivotPair>& pairs) {
    std::ostringstream out;
    for (const auto& pr : pairs) out << "(" << pr.first << "," << pr.second << ")";
    return out.str();
}

std::string image_to_string(const std::vector<int>& q) {
    if (q.empty()) return "identity";
    std::ostringstream out;
    out << "(";
    for (std::size_t k = 0; k < q.size(); ++k) out << (k ? "," : "") << q[k];
    out << ")";
    return out.str();
}

const char* shape_name(int shape) {
    switch (shape) {
    case 0: return "structural";
    case 1: return "relabel-then-weak";
    default: return "weak-then-relabel";
    }
}

/// Map a thrown domain error to the documented process exit code.
int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const NonConvergence*>(&e)) return 3;
    if (dynamic_cast<const UbcUnsatisfied*>(&e)) return 3;
    return 1;
}

ojson witness_json(const ClassWitness& w) {
    ojson j;
    j["anchor"] = to_string(w.anchor);
    j["q"] = w.q;
    j["d"] = w.d;
    j["shape"] = shape_name(w.shape);
    j["target"] = pairs_to_string(w.target.pairs);
    return j;
}

ojson matrix_source_json(const MatrixSource& src) {
    ojson j;
    if (!src.file.empty()) {
        j["file"] = src.file;
    } else {
        j["generator"] = src.generator;
        j["n"] = src.n;
        j["seed"] = src.seed;
        j["scale"] = src.scale;
    }
    return j;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open for writing: " + path);
    f << content;
    if (!f) throw IoError("write failed: " + path);
}

} // namespace

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

StrategySpec parse_strategy_spec(const std::string& text) {
    StrategySpec spec;
    spec.text = trim(text);
    const std::string& t = spec.text;
    if (t.rfind("class:", 0) == 0) {
        spec.is_class = true;
        const auto tokens = split_ws(t.substr(6));
        if (tokens.empty()) throw InvalidArgument("strategy spec: missing class name");
        const auto cls = ordering_class_from_string(tokens[0]);
        if (!cls) throw InvalidArgument("strategy spec: unknown class '" + tokens[0] + "'");
        spec.cls = *cls;
        bool have_m = false;
        for (std::size_t k = 1; k < tokens.size(); ++k) {
            const auto eq = tokens[k].find('=');
            if (eq == std::string::npos)
                throw InvalidArgument("strategy spec: expected key=value, got '" + tokens[k] + "'");
            const std::string key = tokens[k].substr(0, eq);
            const std::string val = tokens[k].substr(eq + 1);
            if (key == "m") {
                spec.m = static_cast<int>(parse_long(val, "m"));
                have_m = true;
            } else if (key == "seed") {
                spec.seed = static_cast<std::uint64_t>(parse_long(val, "seed"));
            } else if (key == "d") {
                spec.shifts = static_cast<int>(parse_long(val, "d"));
            } else {
                throw InvalidArgument("strategy spec: unknown key '" + key + "'");
            }
        }
        if (!have_m || spec.m < 2) throw InvalidArgument("strategy spec: class form requires m>=2");
        return spec;
    }
    if (t.rfind("pairs:", 0) == 0) {
        std::string body = t.substr(6);
        body.erase(std::remove_if(body.begin(), body.end(),
                                  [](unsigned char c) { return std::isspace(c); }),
                   body.end());
        std::size_t pos = 0;
        while (pos < body.size()) {
            if (body[pos] != '(') throw InvalidArgument("strategy spec: expected '(' in pair list");
            const auto comma = body.find(',', pos);
            const auto close = body.find(')', pos);
            if (comma == std::string::npos || close == std::string::npos || comma > close)
                throw InvalidArgument("strategy spec: malformed pair in list");
            const int i = static_cast<int>(parse_long(body.substr(pos + 1, comma - pos - 1), "pair index"));
            const int j = static_cast<int>(parse_long(body.substr(comma + 1, close - comma - 1), "pair index"));
            spec.pairs.emplace_back(i, j);
            pos = close + 1;
            if (pos < body.size()) {
                if (body[pos] != ',') throw InvalidArgument("strategy spec: expected ',' between pairs");
                ++pos;
            }
        }
        if (spec.pairs.empty()) throw InvalidArgument("strategy spec: empty pair list");
        return spec;
    }
    throw InvalidArgument("strategy spec must start with 'class:' or 'pairs:'");
}

Partition parse_partition_spec(const std::string& text) {
    std::string t = trim(text);
    if (t.rfind("pi:", 0) == 0) t = t.substr(3);
    if (t.empty()) throw InvalidArgument("partition spec is empty");
    std::vector<int> sizes;
    std::size_t pos = 0;
    while (pos <= t.size()) {
        const auto comma = t.find(',', pos);
        const std::string item = trim(comma == std::string::npos ? t.substr(pos)
                                                                 : t.substr(pos, comma - pos));
        if (item.empty()) throw InvalidArgument("partition spec: empty entry");
        sizes.push_back(static_cast<int>(parse_long(item, "partition size")));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return Partition(sizes);
}

ResolvedStrategy resolve_strategy(const StrategySpec& spec, int m_expected) {
    ResolvedStrategy rs;
    if (spec.is_class) {
        if (m_expected > 0 && spec.m != m_expected)
            throw InvalidArgument("strategy spec m does not match the partition block count");
        GenerateOptions opts;
        opts.requested_shifts = spec.shifts;
        GeneratedOrdering g = generate_class(spec.cls, spec.m, spec.seed, opts);
        rs.sequence = std::move(g.seq);
        rs.has_witness = true;
        rs.cls = spec.cls;
        rs.witness = std::move(g.witness);
        return rs;
    }
    int m = m_expected;
    if (m <= 0) {
        for (const auto& pr : spec.pairs) m = std::max({m, pr.first, pr.second});
        m = std::max(m, 2);
    }
    rs.sequence = PivotSequence(m, spec.pairs);
    return rs;
}

// ---------------------------------------------------------------------------
// Matrix sources and IO
// ---------------------------------------------------------------------------

SymmetricMatrix read_matrix_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open matrix file: " + path);
    long n = 0;
    if (!(f >> n) || n <= 0) throw IoError("matrix file: bad order line in " + path);
    DenseMatrix X(static_cast<std::size_t>(n), static_cast<std::size_t>(n));
    for (long r = 0; r < n; ++r)
        for (long c = 0; c < n; ++c)
            if (!(f >> X(static_cast<std::size_t>(r), static_cast<std::size_t>(c))))
                throw IoError("matrix file: expected " + std::to_string(n * n) + " entries in " + path);
    try {
        return SymmetricMatrix::from_dense(X, 1e-12);
    } catch (const InvalidArgument&) {
        throw IoError("matrix file: not symmetric within 1e-12: " + path);
    }
}

void write_matrix_file(const std::string& path, const SymmetricMatrix& A) {
    std::ostringstream out;
    const std::size_t n = A.order();
    out << n << "\n";
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < n; ++c) {
            if (c) out << " ";
            out << format_double(A(r, c));
        }
        out << "\n";
    }
    write_text_file(path, out.str());
}

SymmetricMatrix make_matrix(const MatrixSource& src, std::uint64_t seed_offset) {
    if (!src.file.empty()) return read_matrix_file(src.file);
    if (src.n <= 0) throw InvalidArgument("matrix source: n must be positive for generated matrices");
    Rng rng(src.seed + seed_offset);
    const auto n = static_cast<std::size_t>(src.n);
    if (src.generator == "symmetric") return random_symmetric(n, rng, src.scale);
    if (src.generator == "spd") {
        SymmetricMatrix A = random_spd(n, rng);
        if (src.scale != 1.0)
            for (std::size_t s = 0; s < n; ++s)
                for (std::size_t t = 0; t <= s; ++t) A.set(s, t, src.scale * A(s, t));
        return A;
    }
    if (src.generator == "diagonal") {
        SymmetricMatrix A(n);
        for (std::size_t k = 0; k < n; ++k) A.set(k, k, rng.uniform(-src.scale, src.scale));
        return A;
    }
    throw InvalidArgument("matrix source: unknown generator '" + src.generator + "'");
}

std::string format_double(double v) {
    if (v == 0.0) return std::signbit(v) ? "-0" : "0";
    char buf[64];
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

UbcMode parse_ubc_mode(const std::string& s) {
    if (s == "always") return UbcMode::Always;
    if (s == "adaptive") return UbcMode::Adaptive;
    if (s == "never") return UbcMode::Never;
    throw InvalidArgument("ubc mode must be always|adaptive|never, got '" + s + "'");
}

EigOrder parse_eig_order(const std::string& s) {
    if (s == "none") return EigOrder::None;
    if (s == "nonincreasing") return EigOrder::Nonincreasing;
    if (s == "nondecreasing") return EigOrder::Nondecreasing;
    throw InvalidArgument("eig order must be none|nonincreasing|nondecreasing, got '" + s + "'");
}

const char* to_string(UbcMode m) {
    switch (m) {
    case UbcMode::Always: return "always";
    case UbcMode::Adaptive: return "adaptive";
    default: return "never";
    }
}

const char* to_string(EigOrder o) {
    switch (o) {
    case EigOrder::Nonincreasing: return "nonincreasing";
    case EigOrder::Nondecreasing: return "nondecreasing";
    default: return "none";
    }
}

int worker_thread_cap(int jobs) {
    int cap = 0;
    if (const char* env = std::getenv("BJLAB_THREADS")) {
        cap = std::atoi(env);
        if (cap < 1) cap = 1;
    } else {
        cap = static_cast<int>(std::thread::hardware_concurrency());
        if (cap < 1) cap = 1;
    }
    return std::min(cap, std::max(jobs, 1));
}

DenseMatrix sample_ubc_factor(int ni, int nj, double rho, Rng& rng) {
    const int w = ni + nj;
    for (int attempt = 0; attempt < 64; ++attempt) {
        DenseMatrix U = random_orthogonal(static_cast<std::size_t>(w), rng);
        std::vector<double> dummy(static_cast<std::size_t>(w), 0.0);
        try {
            enforce_ubc(U, dummy, ni, nj, rho);
            return U;
        } catch (const UbcUnsatisfied&) {
            continue;
        }
    }
    throw NonConvergence("sample_ubc_factor: no draw met the sigma_min floor");
}

// ---------------------------------------------------------------------------
// cmd_run
// ---------------------------------------------------------------------------

namespace {

struct RepOutcome {
    std::uint64_t seed = 0;
    bool converged = false;
    BlockJacobiResult res;
    int windows = 0;
    int violations = 0;
    double max_window_ratio = 0;
};

std::string steps_csv(const ConvergenceTrace& trace) {
    std::ostringstream out;
    out << "# bjlab-steps-v1\n";
    out << "sweep,step,i,j,off_before,off_after,pivot_norm,sigma_min_ii,ubc\n";
    for (const auto& st : trace.steps)
        out << st.sweep << "," << st.step << "," << st.pivot.i << "," << st.pivot.j << ","
            << format_double(st.off_before) << "," << format_double(st.off_after) << ","
            << format_double(st.pivot_norm) << "," << format_double(st.sigma_min_ii) << ","
            << (st.ubc_applied ? 1 : 0) << "\n";
    return out.str();
}

std::string sweeps_csv(const ConvergenceTrace& trace, bool have_bound, const SweepBound& bound) {
    std::ostringstream out;
    out << "# bjlab-sweeps-v1\n";
    out << "sweep,off_before,off_after,ratio,window_ratio,eta,margin\n";
    for (std::size_t k = 0; k < trace.sweeps.size(); ++k) {
        const auto& sw = trace.sweeps[k];
        out << sw.sweep << "," << format_double(sw.off_before) << ","
            << format_double(sw.off_after) << "," << format_double(sw.ratio) << ",";
        const bool closes_window =
            have_bound && bound.sweeps > 0 && (k + 1) % static_cast<std::size_t>(bound.sweeps) == 0;
        if (closes_window) {
            const auto& first = trace.sweeps[k + 1 - static_cast<std::size_t>(bound.sweeps)];
            const double before = first.off_before;
            const double wr = before > 0.0 ? (sw.off_after * sw.off_after) / (before * before) : 0.0;
            out << format_double(wr) << "," << format_double(bound.eta) << ","
                << format_double(bound.eta - wr);
        } else {
            out << ",,";
        }
        out << "\n";
    }
    return out.str();
}

} // namespace

RunOptions run_options_from_json(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open config file: " + path);
    ojson j;
    try {
        j = ojson::parse(f);
    } catch (const std::exception& e) {
        throw IoError("config parse error in " + path + ": " + e.what());
    }
    RunOptions o;
    if (j.contains("matrix")) {
        const auto& m = j["matrix"];
        o.matrix.file = m.value("file", std::string{});
        o.matrix.generator = m.value("generator", std::string{"symmetric"});
        o.matrix.n = m.value("n", 0);
        o.matrix.seed = m.value("seed", std::uint64_t{1});
        o.matrix.scale = m.value("scale", 1.0);
    }
    if (j.contains("partition")) {
        if (j["partition"].is_array()) {
            std::string spec;
            for (const auto& v : j["partition"])
                spec += (spec.empty() ? "" : ",") + std::to_string(v.get<long>());
            o.partition = spec;
        } else {
            o.partition = j["partition"].get<std::string>();
        }
    }
    o.strategy = j.value("strategy", std::string{});
    if (j.contains("solver")) {
        const auto& s = j["solver"];
        o.solver.rho = s.value("rho", 1.0);
        o.solver.ubc = parse_ubc_mode(s.value("ubc", std::string{"always"}));
        o.solver.eig_order = parse_eig_order(s.value("eig_order", std::string{"none"}));
        o.solver.tol = s.value("tol", 1e-10);
        o.solver.max_sweeps = s.value("max_sweeps", 64);
        o.solver.adaptive_switch = s.value("adaptive_switch", 1e-2);
    }
    o.out_dir = j.value("out_dir", std::string{});
    o.check_bounds = j.value("check_bounds", false);
    o.repetitions = j.value("repetitions", 1);
    return o;
}

int cmd_run(const RunOptions& opt, std::ostream& out, std::ostream& err) {
    try {
        const Partition pi = parse_partition_spec(opt.partition);
        const StrategySpec spec = parse_strategy_spec(opt.strategy);
        const ResolvedStrategy rs = resolve_strategy(spec, pi.m());

        bool have_bound = false;
        SweepBound bound;
        if (opt.check_bounds) {
            bound = rs.has_witness ? sweep_bound_for(rs.cls, rs.witness, pi, opt.solver.rho)
                                   : mu_for_sequence(rs.sequence, pi, opt.solver.rho);
            have_bound = true;
        }
        if (opt.repetitions < 1) throw InvalidArgument("run: repetitions must be positive");

        const int reps = opt.repetitions;
        std::vector<RepOutcome> outcome(static_cast<std::size_t>(reps));
        std::vector<std::exception_ptr> failures(static_cast<std::size_t>(reps));

        auto run_one = [&](int k) noexcept {
            auto& R = outcome[static_cast<std::size_t>(k)];
            try {
                R.seed = opt.matrix.seed + static_cast<std::uint64_t>(k);
                const SymmetricMatrix A = make_matrix(opt.matrix, static_cast<std::uint64_t>(k));
                try {
                    R.res = block_jacobi_solve(A, pi, rs.sequence, opt.solver);
                    R.converged = true;
                } catch (const SweepCapExceeded& e) {
                    R.res = e.partial();
                    R.converged = false;
                }
                if (have_bound && bound.sweeps > 0) {
                    const auto& sws = R.res.trace.sweeps;
                    const auto win = static_cast<std::size_t>(bound.sweeps);
                    for (std::size_t w0 = 0; w0 + win <= sws.size(); w0 += win) {
                        const double before = sws[w0].off_before;
                        const double after = sws[w0 + win - 1].off_after;
                        const double ratio = before > 0.0 ? (after * after) / (before * before) : 0.0;
                        R.max_window_ratio = std::max(R.max_window_ratio, ratio);
                        ++R.windows;
                        if (ratio > bound.eta + 1e-12) ++R.violations;
                    }
                }
            } catch (...) {
                failures[static_cast<std::size_t>(k)] = std::current_exception();
            }
        };

        const int workers = worker_thread_cap(reps);
        if (workers <= 1 || reps == 1) {
            for (int k = 0; k < reps; ++k) run_one(k);
        } else {
            std::atomic<int> next{0};
            std::vector<std::thread> pool;
            pool.reserve(static_cast<std::size_t>(workers));
            for (int w = 0; w < workers; ++w)
                pool.emplace_back([&] {
                    for (;;) {
                        const int k = next.fetch_add(1);
                        if (k >= reps) return;
                        run_one(k);
                    }
                });
            for (auto& th : pool) th.join();
        }
        for (int k = 0; k < reps; ++k)
            if (failures[static_cast<std::size_t>(k)]) std::rethrow_exception(failures[static_cast<std::size_t>(k)]);

        ojson agg;
        agg["version"] = "bjlab-run-v1";
        ojson cfg;
        cfg["matrix"] = matrix_source_json(opt.matrix);
        cfg["partition"] = pi.sizes();
        cfg["strategy"] = spec.text;
        cfg["pairs"] = ojson::array();
        for (const auto& pr : rs.sequence.pairs) cfg["pairs"].push_back({pr.first, pr.second});
        ojson solver;
        solver["rho"] = opt.solver.rho;
        solver["ubc"] = to_string(opt.solver.ubc);
        solver["eig_order"] = to_string(opt.solver.eig_order);
        solver["tol"] = opt.solver.tol;
        solver["max_sweeps"] = opt.solver.max_sweeps;
        solver["adaptive_switch"] = opt.solver.adaptive_switch;
        cfg["solver"] = solver;
        cfg["check_bounds"] = opt.check_bounds;
        cfg["repetitions"] = reps;
        agg["config"] = cfg;
        if (have_bound) {
            ojson b;
            b["class"] = to_string(bound.kind);
            b["eta"] = bound.eta;
            b["mu"] = bound.mu;
            b["sweeps"] = bound.sweeps;
            b["sizes"] = bound.sizes_used.sizes();
            b["witness"] = witness_json(bound.witness);
            agg["bound"] = b;
        }

        bool all_converged = true;
        int total_violations = 0;
        double max_window_ratio = 0;
        ojson reps_json = ojson::array();
        for (int k = 0; k < reps; ++k) {
            const auto& R = outcome[static_cast<std::size_t>(k)];
            all_converged = all_converged && R.converged;
            total_violations += R.violations;
            max_window_ratio = std::max(max_window_ratio, R.max_window_ratio);
            ojson rj;
            rj["index"] = k;
            rj["seed"] = R.seed;
            rj["converged"] = R.converged;
            rj["sweeps"] = R.res.sweeps;
            rj["off_initial"] = R.res.off_initial;
            rj["off_final"] = R.res.off_final;
            rj["norm_initial"] = R.res.norm_initial;
            rj["eigenvalues"] = R.res.eigenvalues;
            if (have_bound) {
                rj["windows"] = R.windows;
                rj["violations"] = R.violations;
                rj["max_window_ratio"] = R.max_window_ratio;
            }
            reps_json.push_back(rj);
        }
        agg["repetitions"] = reps_json;
        ojson summary;
        summary["all_converged"] = all_converged;
        summary["bound_checked"] = have_bound;
        if (have_bound) {
            summary["total_violations"] = total_violations;
            summary["max_window_ratio"] = max_window_ratio;
        }
        agg["aggregate"] = summary;

        if (!opt.out_dir.empty()) {
            fs::create_directories(opt.out_dir);
            for (int k = 0; k < reps; ++k) {
                const auto& R = outcome[static_cast<std::size_t>(k)];
                const std::string base = opt.out_dir + "/rep" + std::to_string(k);
                write_text_file(base + "_steps.csv", steps_csv(R.res.trace));
                write_text_file(base + "_sweeps.csv", sweeps_csv(R.res.trace, have_bound, bound));
                write_text_file(base + "_summary.json", reps_json[static_cast<std::size_t>(k)].dump(2) + "\n");
            }
            write_text_file(opt.out_dir + "/summary.json", agg.dump(2) + "\n");
        }
        out << agg.dump(2) << "\n";

        if (total_violations > 0) return 2;
        if (!all_converged) return 3;
        return 0;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_code_for(e);
    }
}

// ---------------------------------------------------------------------------
// cmd_operator_norm
// ---------------------------------------------------------------------------

int cmd_operator_norm(const OperatorNormOptions& opt, std::ostream& out, std::ostream& err) {
    try {
        const Partition pi = parse_partition_spec(opt.partition);
        const StrategySpec spec = parse_strategy_spec(opt.strategy);
        const ResolvedStrategy rs = resolve_strategy(spec, pi.m());
        const SweepBound bound = rs.has_witness
                                     ? sweep_bound_for(rs.cls, rs.witness, pi, opt.rho)
                                     : mu_for_sequence(rs.sequence, pi, opt.rho);
        if (pi.K() > 2000) throw UnsupportedSize("operator-norm: K exceeds the dense limit 2000");
        if (opt.samples < 1) throw InvalidArgument("operator-norm: samples must be positive");

        double max_norm = 0;
        int violations = 0;
        for (int s = 0; s < opt.samples; ++s) {
            Rng rng(opt.seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(s + 1));
            std::vector<std::pair<BlockIndex, DenseMatrix>> factors;
            factors.reserve(static_cast<std::size_t>(bound.sweeps) * rs.sequence.pairs.size());
            for (int rep = 0; rep < bound.sweeps; ++rep)
                for (const auto& pr : rs.sequence.pairs)
                    factors.emplace_back(BlockIndex{pr.first, pr.second},
                                         sample_ubc_factor(pi.size(pr.first), pi.size(pr.second),
                                                           opt.rho, rng));
            const BlockJacobiOperator J(pi, factors);
            const double norm = operator_norm(J);
            max_norm = std::max(max_norm, norm);
            if (norm > bound.mu + 1e-9) ++violations;
        }

        ojson j;
        j["version"] = "bjlab-opnorm-v1";
        j["partition"] = pi.sizes();
        j["strategy"] = spec.text;
        j["rho"] = opt.rho;
        j["samples"] = opt.samples;
        j["seed"] = opt.seed;
        j["class"] = to_string(bound.kind);
        j["sweeps"] = bound.sweeps;
        j["eta"] = bound.eta;
        j["mu"] = bound.mu;
        j["max_norm"] = max_norm;
        j["margin"] = bound.mu - max_norm;
        j["violations"] = violations;
        out << j.dump(2) << "\n";
        return violations > 0 ? 2 : 0;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_code_for(e);
    }
}

// ---------------------------------------------------------------------------
// cmd_classify
// ---------------------------------------------------------------------------

namespace {

void print_witness(std::ostream& out, const ClassWitness& w, const std::string& indent) {
    out << indent << "anchor=" << to_string(w.anchor) << " q=" << image_to_string(w.q)
        << " d=" << w.d << " shape=" << shape_name(w.shape) << "\n";
    out << indent << "target: " << pairs_to_string(w.target.pairs) << "\n";
    if (!w.chain.empty()) {
        out << indent << "chain:\n";
        for (const auto& link : w.chain) {
            out << indent << "  ";
            if (link.is_shift)
                out << "shift " << link.shift << " -> ";
            else
                out << "~ -> ";
            out << pairs_to_string(link.to.pairs) << "\n";
        }
    }
}

} // namespace

int cmd_classify(const ClassifyOptions& opt, std::ostream& out, std::ostream& err) {
    try {
        const StrategySpec spec = parse_strategy_spec(opt.strategy);
        const ResolvedStrategy rs = resolve_strategy(spec, 0);
        const PivotSequence& o = rs.sequence;

        out << "strategy: " << spec.text << "\n";
        out << "pairs: " << pairs_to_string(o.pairs) << "\n";
        out << "m: " << o.m << "  T: " << o.T() << "  M: " << o.M() << "\n";
        out << "covering: " << (o.is_covering() ? "yes" : "no")
            << "  cyclic: " << (o.is_cyclic() ? "yes" : "no")
            << "  quasi-cyclic: " << (o.is_quasi_cyclic() ? "yes" : "no") << "\n";
        if (!o.is_covering()) {
            out << "not a pivot strategy: the sequence does not cover every index pair\n";
            return 0;
        }
        if (o.is_cyclic()) {
            out << "ordering matrix:\n" << ordering_matrix(o).render();
        }

        std::vector<OrderingClass> kinds;
        if (!opt.requested_class.empty()) {
            const auto k = ordering_class_from_string(opt.requested_class);
            if (!k) throw InvalidArgument("classify: unknown class '" + opt.requested_class + "'");
            kinds.push_back(*k);
        } else {
            kinds = {OrderingClass::B_c,      OrderingClass::B_r,      OrderingClass::B_c_rev,
                     OrderingClass::B_r_rev,  OrderingClass::B_sp,     OrderingClass::B_spg,
                     OrderingClass::B_sg,     OrderingClass::barB_c,   OrderingClass::barB_r,
                     OrderingClass::barB_c_rev, OrderingClass::barB_r_rev, OrderingClass::barB_sp,
                     OrderingClass::barB_spg, OrderingClass::barB_sg};
        }

        out << "memberships:\n";
        for (const auto kind : kinds) {
            out << "  " << to_string(kind) << ": ";
            try {
                const RecognitionResult r = recognize_class(kind, o);
                if (r.member) {
                    out << "member\n";
                    print_witness(out, r.witness, "    ");
                } else {
                    out << "no\n";
                }
            } catch (const UnsupportedSize& e) {
                if (!opt.requested_class.empty()) {
                    out << "\n";
                    err << "error: " << e.what() << "\n";
                    return 1;
                }
                out << "skipped (" << e.what() << ")\n";
            }
        }
        return 0;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_code_for(e);
    }
}

// ---------------------------------------------------------------------------
// cmd_jjacobi
// ---------------------------------------------------------------------------

namespace {

std::string jjacobi_steps_csv(const JJacobiTrace& trace) {
    std::ostringstream out;
    out << "# bjlab-jjacobi-steps-v1\n";
    out << "sweep,step,i,j,off_before,off_after,pivot_norm,sigma_min_ii,max_sigma_dev,"
           "pivot_residual_ratio,hyperbolic\n";
    for (const auto& st : trace.steps)
        out << st.sweep << "," << st.step << "," << st.pivot.i << "," << st.pivot.j << ","
            << format_double(st.off_before) << "," << format_double(st.off_after) << ","
            << format_double(st.pivot_norm) << "," << format_double(st.sigma_min_ii) << ","
            << format_double(st.max_sigma_dev) << "," << format_double(st.pivot_residual_ratio)
            << "," << (st.hyperbolic ? 1 : 0) << "\n";
    return out.str();
}

std::string jjacobi_sweeps_csv(const JJacobiTrace& trace) {
    std::ostringstream out;
    out << "# bjlab-jjacobi-sweeps-v1\n";
    out << "sweep,off_before,off_after,ratio,norm_after\n";
    for (const auto& sw : trace.sweeps)
        out << sw.sweep << "," << format_double(sw.off_before) << ","
            << format_double(sw.off_after) << "," << format_double(sw.ratio) << ","
            << format_double(sw.norm_after) << "\n";
    return out.str();
}

} // namespace

JJacobiOptions jjacobi_options_from_json(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open config file: " + path);
    ojson j;
    try {
        j = ojson::parse(f);
    } catch (const std::exception& e) {
        throw IoError("config parse error in " + path + ": " + e.what());
    }
    JJacobiOptions o;
    o.matrix.generator = "spd";
    if (j.contains("matrix")) {
        const auto& m = j["matrix"];
        o.matrix.file = m.value("file", std::string{});
        o.matrix.generator = m.value("generator", std::string{"spd"});
        o.matrix.n = m.value("n", 0);
        o.matrix.seed = m.value("seed", std::uint64_t{1});
        o.matrix.scale = m.value("scale", 1.0);
    }
    if (j.contains("partition")) {
        if (j["partition"].is_array()) {
            std::string spec;
            for (const auto& v : j["partition"])
                spec += (spec.empty() ? "" : ",") + std::to_string(v.get<long>());
            o.partition = spec;
        } else {
            o.partition = j["partition"].get<std::string>();
        }
    }
    o.strategy = j.value("strategy", std::string{});
    o.nu = j.value("nu", 0);
    if (j.contains("solver")) {
        const auto& s = j["solver"];
        o.config.tol = s.value("tol", 1e-12);
        o.config.max_sweeps = s.value("max_sweeps", 40);
        o.config.inner_tol = s.value("inner_tol", 1e-14);
        o.config.growth_limit = s.value("growth_limit", 10.0);
    }
    o.out_dir = j.value("out_dir", std::string{});
    return o;
}

int cmd_jjacobi(const JJacobiOptions& opt, std::ostream& out, std::ostream& err) {
    try {
        const Partition pi = parse_partition_spec(opt.partition);
        const StrategySpec spec = parse_strategy_spec(opt.strategy);
        const ResolvedStrategy rs = resolve_strategy(spec, pi.m());
        const SymmetricMatrix A = make_matrix(opt.matrix);

        JJacobiResult res;
        int code = 0;
        try {
            res = jjacobi_solve(A, pi, opt.nu, rs.sequence, opt.config);
        } catch (const JSweepCapExceeded& e) {
            res = e.partial();
            code = 3;
            err << "error: " << e.what() << "\n";
        } catch (const NotPositiveDefinite& e) {
            err << "error: " << e.what() << "\n";
            return 1;
        }

        double min_sigma = res.trace.steps.empty() ? 1.0 : res.trace.steps[0].sigma_min_ii;
        double max_dev = 0, max_residual = 0;
        for (const auto& st : res.trace.steps) {
            min_sigma = std::min(min_sigma, st.sigma_min_ii);
            max_dev = std::max(max_dev, st.max_sigma_dev);
            max_residual = std::max(max_residual, st.pivot_residual_ratio);
        }

        ojson j;
        j["version"] = "bjlab-jjacobi-v1";
        ojson cfg;
        cfg["matrix"] = matrix_source_json(opt.matrix);
        cfg["partition"] = pi.sizes();
        cfg["strategy"] = spec.text;
        cfg["nu"] = opt.nu;
        cfg["tol"] = opt.config.tol;
        cfg["max_sweeps"] = opt.config.max_sweeps;
        j["config"] = cfg;
        j["converged"] = res.converged;
        j["sweeps"] = res.sweeps;
        j["off_final"] = res.off_final;
        j["norm_initial"] = res.norm_initial;
        j["norm_final"] = res.norm_final;
        ojson assume;
        assume["positive_definite"] = true;
        assume["signature_boundary"] = true;
        assume["norm_growth_flag"] = res.norm_growth_flag;
        assume["fjf_deviation"] = res.fjf_deviation;
        assume["min_sigma_min_ii"] = min_sigma;
        assume["max_sigma_dev"] = max_dev;
        assume["max_pivot_residual_ratio"] = max_residual;
        j["assumptions"] = assume;
        j["diagonal"] = res.diagonal;
        j["pencil_eigenvalues"] = res.pencil_eigenvalues;

        if (!opt.out_dir.empty()) {
            fs::create_directories(opt.out_dir);
            write_text_file(opt.out_dir + "/jjacobi_steps.csv", jjacobi_steps_csv(res.trace));
            write_text_file(opt.out_dir + "/jjacobi_sweeps.csv", jjacobi_sweeps_csv(res.trace));
            write_text_file(opt.out_dir + "/jjacobi_summary.json", j.dump(2) + "\n");
        }
        out << j.dump(2) << "\n";
        return code;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_code_for(e);
    }
}

// ---------------------------------------------------------------------------
// cmd_bounds
// ---------------------------------------------------------------------------

int cmd_bounds(const BoundsOptions& opt, std::ostream& out, std::ostream& err) {
    try {
        const Partition pi = parse_partition_spec(opt.partition);
        if (pi.m() < 2) throw InvalidArgument("bounds: need at least two blocks");
        const BoundConstants bc = compute_bounds(pi, opt.rho);

        std::ostringstream sizes;
        for (std::size_t k = 0; k < pi.sizes().size(); ++k)
            sizes << (k ? "," : "") << pi.sizes()[k];
        out << "partition: " << sizes.str() << "  (n=" << pi.n() << ", m=" << pi.m()
            << ", M=" << pi.M() << ", K=" << pi.K() << ")\n";
        out << "rho: " << format_double(opt.rho) << "\n";
        out << std::left << std::setw(4) << "l" << std::setw(6) << "s_l" << std::setw(24)
            << "zeta_pairwise" << std::setw(24) << "zeta_uniform" << std::setw(24) << "eta"
            << "eta_tilde" << "\n";
        for (const auto& lv : bc.levels) {
            out << std::left << std::setw(4) << lv.l << std::setw(6) << lv.s << std::setw(24)
                << format_double(lv.zeta_floor_pairwise) << std::setw(24)
                << format_double(lv.zeta_floor_uniform) << std::setw(24) << format_double(lv.eta)
                << format_double(lv.eta_tilde) << "\n";
        }
        out << "eta: " << format_double(bc.eta) << "  mu: " << format_double(bc.mu)
            << "  gap: " << format_double(bc.gap) << "\n";
        out << "eta_tilde: " << format_double(bc.eta_tilde)
            << "  mu_tilde: " << format_double(bc.mu_tilde)
            << "  gap_tilde: " << format_double(bc.gap_tilde) << "\n";
        if (pi.all_unit_blocks() && opt.rho == 1.0) {
            out << "elementwise eta (unit blocks): " << format_double(eta_elementwise(pi.m()))
                << "\n";
        }
        out << "effective eta: " << format_double(effective_eta(pi, opt.rho)) << "\n";

        if (!opt.strategy.empty()) {
            const StrategySpec spec = parse_strategy_spec(opt.strategy);
            const ResolvedStrategy rs = resolve_strategy(spec, pi.m());
            const SweepBound b = rs.has_witness ? sweep_bound_for(rs.cls, rs.witness, pi, opt.rho)
                                                : mu_for_sequence(rs.sequence, pi, opt.rho);
            std::ostringstream used;
            for (std::size_t k = 0; k < b.sizes_used.sizes().size(); ++k)
                used << (k ? "," : "") << b.sizes_used.sizes()[k];
            out << "strategy: " << spec.text << "\n";
            out << "certified: class=" << to_string(b.kind) << " sweeps=" << b.sweeps
                << " eta=" << format_double(b.eta) << " mu=" << format_double(b.mu)
                << " sizes=" << used.str() << "\n";
        }
        return 0;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_code_for(e);
    }
}

} // namespace bjlab
