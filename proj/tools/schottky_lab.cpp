// schottky-lab: command-line front end for the Schottky transfer-operator library.
//
// Exit codes: 0 ok, 1 invalid input geometry, 2 parse error, 3 refusal,
// 4 numerical failure.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "schottky/dimension.hpp"
#include "schottky/io.hpp"
#include "schottky/norm_bounds.hpp"
#include "schottky/random_reps.hpp"
#include "schottky/resonance.hpp"
#include "schottky/schottky_data.hpp"

namespace fs = std::filesystem;
using namespace schottky;
using io::json;

namespace {

enum Exit { kOk = 0, kGeometry = 1, kParse = 2, kRefusal = 3, kNumerical = 4 };

struct Globals {
    std::string out;
    int jobs = 1;
    std::uint64_t seed = 0;
    int truncation = 0;  // 0: command default
    std::vector<std::string> argv;
};

template <typename T>
std::vector<T> parse_list(const std::string& text, std::size_t expected, const std::string& what) {
    std::vector<T> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::istringstream is(item);
        T v{};
        is >> v;
        if (!is || !(is >> std::ws).eof()) throw ParseError(what + ": cannot parse \"" + item + "\"");
        out.push_back(v);
    }
    if (expected != 0 && out.size() != expected) {
        throw ParseError(what + ": expected " + std::to_string(expected) + " comma-separated values");
    }
    return out;
}

Rect parse_rect(const std::string& text) {
    const auto v = parse_list<double>(text, 4, "--rect");
    return Rect{v[0], v[1], v[2], v[3]};
}

cplx parse_complex(const std::string& text, const std::string& what) {
    const auto v = parse_list<double>(text, 2, what);
    return cplx{v[0], v[1]};
}

/// Applies a strict JSON config to a subcommand: every key must name one of its
/// long options; flags given on the command line take precedence.
void apply_config(CLI::App* sub, const std::string& path) {
    const std::string text = io::read_file(path);
    const json doc = io::parse_json_text(text, path);
    if (!doc.is_object()) throw ParseError(path + ": config must be a JSON object");
    for (const auto& [key, value] : doc.items()) {
        CLI::Option* opt = sub->get_option_no_throw("--" + key);
        if (opt == nullptr || key == "config") throw ParseError(path + ": unknown key \"" + key + "\"");
        if (opt->count() > 0) continue;
        std::string token;
        if (value.is_string()) {
            token = value.get<std::string>();
        } else if (value.is_array()) {
            for (std::size_t i = 0; i < value.size(); ++i) {
                if (i) token += ",";
                token += value[i].is_string() ? value[i].get<std::string>() : value[i].dump();
            }
        } else {
            token = value.dump();
        }
        opt->add_result(token);
        opt->run_callback();
    }
}

fs::path output_dir(const Globals& g) {
    fs::path dir = g.out;
    if (dir.empty()) {
        const char* env = std::getenv("SCHOTTKY_LAB_OUT");
        dir = env != nullptr && *env != '\0' ? fs::path(env) : fs::path("schottky-lab-out");
    }
    fs::create_directories(dir);
    return dir;
}

SchottkyData load_valid(const std::string& file) {
    SchottkyData data = io::load_schottky(file);
    const ValidationReport rep = validate_schottky(data);
    if (!rep.valid()) {
        std::string msg = file + ": invalid Schottky data";
        for (const auto& f : rep.failures) msg += "; " + f;
        throw GeometryError(msg);
    }
    return data;
}

io::Manifest start_manifest(const Globals& g, const std::string& command, const std::string& file) {
    io::Manifest m;
    m.command = command;
    m.argv = g.argv;
    m.inputs = json{{"schottky_file", file}, {"schottky_data", io::schottky_to_json(io::load_schottky(file))}};
    return m;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void write_json(const fs::path& path, const json& doc) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(path.string() + ": cannot open for writing");
    out << doc.dump(2) << '\n';
}

// --------------------------------------------------------------------------
// validate
// --------------------------------------------------------------------------

int cmd_validate(const Globals& g, const std::string& file) {
    const auto t0 = std::chrono::steady_clock::now();
    const SchottkyData data = io::load_schottky(file);
    const ValidationReport rep = validate_schottky(data);
    std::cout << "file: " << file << "\n"
              << "structural: " << (rep.structural_ok ? "ok" : "FAIL") << "\n"
              << "closure disjointness: " << (rep.disjoint_ok ? "ok" : "FAIL") << " (margin "
              << io::format_double(rep.margin) << ")\n"
              << "mapping condition: " << (rep.mapping_ok ? "ok" : "FAIL") << " (boundary residual "
              << io::format_double(rep.boundary_residual) << ")\n";
    for (const auto& f : rep.failures) std::cout << "  failure: " << f << "\n";
    std::cout << (rep.valid() ? "valid" : "invalid") << "\n";

    const fs::path dir = output_dir(g);
    write_json(dir / "validation.json", json{{"file", file},
                                             {"valid", rep.valid()},
                                             {"structural_ok", rep.structural_ok},
                                             {"disjoint_ok", rep.disjoint_ok},
                                             {"mapping_ok", rep.mapping_ok},
                                             {"margin", rep.margin},
                                             {"boundary_residual", rep.boundary_residual},
                                             {"failures", rep.failures}});
    io::Manifest m = start_manifest(g, "validate", file);
    m.artifacts = {"validation.json"};
    m.wall_time_s = seconds_since(t0);
    m.write(dir);
    return rep.valid() ? kOk : kGeometry;
}

// --------------------------------------------------------------------------
// dim
// --------------------------------------------------------------------------

int cmd_dim(const Globals& g, const std::string& file, double tol) {
    const auto t0 = std::chrono::steady_clock::now();
    const SchottkyData data = load_valid(file);
    const int m = g.truncation > 0 ? g.truncation : 16;
    const DimensionResult r = bowen_dim(BergmanBasis(data, m), tol);
    std::cout << "delta " << io::format_double(r.delta) << "\n"
              << "residual " << io::format_double(r.residual) << "\n"
              << "bracket " << io::format_double(r.bracket_lo) << " " << io::format_double(r.bracket_hi) << "\n"
              << "truncation " << r.degree << "\n";
    const fs::path dir = output_dir(g);
    write_json(dir / "dim.json", json{{"delta", r.delta},
                                      {"residual", r.residual},
                                      {"bracket", {r.bracket_lo, r.bracket_hi}},
                                      {"truncation", r.degree},
                                      {"evaluations", r.evaluations}});
    io::Manifest man = start_manifest(g, "dim", file);
    man.parameters = json{{"tol", tol}, {"truncation", m}};
    man.artifacts = {"dim.json"};
    man.wall_time_s = seconds_since(t0);
    man.write(dir);
    return kOk;
}

// --------------------------------------------------------------------------
// scan
// --------------------------------------------------------------------------

struct ScanArgs {
    std::string rect;
    std::string grid;
    int n = 1;
    int ell = 12;
    int ell_cap = 24;
    double refine_tol = 1e-8;
    bool certificate = false;
};

void write_scan_artifacts(const fs::path& dir, const ZeroReport& z) {
    auto samples = z.samples;
    std::sort(samples.begin(), samples.end(), [](const auto& a, const auto& b) {
        return std::make_pair(a.first.real(), a.first.imag()) < std::make_pair(b.first.real(), b.first.imag());
    });
    io::CsvWriter scan(dir / "scan.csv", {"s_re", "s_im", "det_re", "det_im"});
    for (const auto& [s, d] : samples) scan.row(s.real(), s.imag(), d.real(), d.imag());
    io::CsvWriter zeros(dir / "zeros.csv", {"s_re", "s_im", "mult", "residual"});
    for (const auto& r : z.zeros) zeros.row(r.s.real(), r.s.imag(), r.multiplicity, r.residual);
}

int cmd_scan(const Globals& g, const std::string& file, const ScanArgs& a) {
    const auto t0 = std::chrono::steady_clock::now();
    if (a.rect.empty()) throw ParseError("scan: --rect is required");
    ScanConfig cfg;
    cfg.K = parse_rect(a.rect);
    if (a.grid.empty()) {
        const ScanConfig d = ScanConfig::with_default_grid(cfg.K);
        cfg.n_re = d.n_re;
        cfg.n_im = d.n_im;
    } else {
        const auto v = parse_list<int>(a.grid, 2, "--grid");
        cfg.n_re = v[0];
        cfg.n_im = v[1];
    }
    cfg.ell = a.ell;
    cfg.ell_cap = a.ell_cap;
    cfg.refine_tol = a.refine_tol;
    cfg.seed = g.seed;
    cfg.validate();
    if (a.n < 1) throw ParseError("scan: --n must be >= 1");

    const SchottkyData data = load_valid(file);
    const int m = g.truncation > 0 ? g.truncation : 16;
    const BergmanBasis basis(data, m);
    const PermutationRep perm = sample_hom(a.n, data.rank(), g.seed);
    const Representation rep = a.n == 1 ? Representation::trivial(data.alphabet()) : new_representation(perm);
    ZeroReport z = scan_zeros(cfg, rep, basis);
    if (a.certificate) {
        z.norm_certificate = norm_certificate(
            cfg, a.n == 1 ? dense_norm_oracle(rep, basis, true) : cover_norm_oracle(perm, basis));
    }

    const fs::path dir = output_dir(g);
    write_scan_artifacts(dir, z);
    json summary{{"zero_count", z.zero_count()},
                 {"total_winding", z.total_winding},
                 {"certified_empty", z.certified_empty},
                 {"perturbation", z.perturbation},
                 {"failures", z.failures},
                 {"representation", a.n == 1 ? "base" : "new part of a random degree-n cover"},
                 {"n", a.n}};
    if (z.norm_certificate) {
        const auto& c = *z.norm_certificate;
        summary["norm_certificate"] = json{{"ell", c.ell},
                                           {"max_norm", c.max_norm},
                                           {"max_bound", c.max_bound},
                                           {"certified", c.certified},
                                           {"evaluations", c.evaluations}};
    }
    write_json(dir / "scan_summary.json", summary);
    std::cout << "zeros " << z.zero_count() << " (winding " << z.total_winding << ")\n";
    for (const auto& r : z.zeros) {
        std::cout << "  s = " << io::format_double(r.s.real()) << (r.s.imag() < 0 ? " - " : " + ")
                  << io::format_double(std::abs(r.s.imag())) << "i  mult " << r.multiplicity << "  |det| "
                  << io::format_double(r.residual) << "\n";
    }
    for (const auto& f : z.failures) std::cout << "  contour: " << f << "\n";

    io::Manifest man = start_manifest(g, "scan", file);
    man.parameters = json{{"rect", {cfg.K.re_min, cfg.K.re_max, cfg.K.im_min, cfg.K.im_max}},
                          {"grid", {cfg.n_re, cfg.n_im}},
                          {"n", a.n},
                          {"ell", cfg.ell},
                          {"ell_cap", cfg.ell_cap},
                          {"refine_tol", cfg.refine_tol},
                          {"certificate", a.certificate},
                          {"truncation", m}};
    man.seeds = {g.seed};
    man.artifacts = {"scan.csv", "zeros.csv", "scan_summary.json"};
    man.wall_time_s = seconds_since(t0);
    man.write(dir);
    return z.perturbation < 0 ? kNumerical : kOk;
}

// --------------------------------------------------------------------------
// cover
// --------------------------------------------------------------------------

struct CoverArgs {
    std::string n_list = "20,50,100";
    int trials = 50;
    std::string rect;
    std::string grid = "2,16";
    int ell = 12;
    int ell_cap = 24;
};

int cmd_cover(const Globals& g, const std::string& file, const CoverArgs& a) {
    const auto t0 = std::chrono::steady_clock::now();
    const SchottkyData data = load_valid(file);
    const int m = g.truncation > 0 ? g.truncation : 8;
    const BergmanBasis basis(data, m);
    const double delta = bowen_dim(basis).delta;

    ExperimentConfig cfg;
    cfg.scan.K = a.rect.empty() ? Rect{delta / 2 + 0.1, delta + 0.1, -2.0, 2.0} : parse_rect(a.rect);
    const auto grid = parse_list<int>(a.grid, 2, "--grid");
    cfg.scan.n_re = grid[0];
    cfg.scan.n_im = grid[1];
    cfg.scan.ell = a.ell;
    cfg.scan.ell_cap = a.ell_cap;
    cfg.scan.seed = g.seed;
    cfg.n_list = parse_list<int>(a.n_list, 0, "--n");
    cfg.trials = a.trials;
    cfg.seed = g.seed;
    cfg.jobs = g.jobs;
    const ExperimentReport rep = cover_experiment(cfg, basis, delta);

    const fs::path dir = output_dir(g);
    {
        io::CsvWriter csv(dir / "experiment.csv",
                          {"n", "trial", "seed", "certified", "ell", "max_norm", "new_zero_count"});
        for (const auto& r : rep.records) csv.row(r.n, r.trial, r.seed, r.certified, r.ell, r.max_norm, r.new_zero_count);
    }
    json fractions = json::object();
    for (int n : cfg.n_list) {
        fractions[std::to_string(n)] = rep.success_fraction(n);
        std::cout << "n " << n << " success fraction " << io::format_double(rep.success_fraction(n)) << "\n";
    }
    write_json(dir / "experiment_summary.json", json{{"delta", delta},
                                                     {"rect", {cfg.scan.K.re_min, cfg.scan.K.re_max,
                                                               cfg.scan.K.im_min, cfg.scan.K.im_max}},
                                                     {"base_zero_count", rep.base_zero_count},
                                                     {"success_fraction", fractions}});
    io::Manifest man = start_manifest(g, "cover", file);
    man.parameters = json{{"n", cfg.n_list},
                          {"trials", cfg.trials},
                          {"rect", {cfg.scan.K.re_min, cfg.scan.K.re_max, cfg.scan.K.im_min, cfg.scan.K.im_max}},
                          {"grid", {cfg.scan.n_re, cfg.scan.n_im}},
                          {"ell", cfg.scan.ell},
                          {"ell_cap", cfg.scan.ell_cap},
                          {"truncation", m},
                          {"jobs", g.jobs}};
    man.seeds = {g.seed};
    man.artifacts = {"experiment.csv", "experiment_summary.json"};
    man.wall_time_s = seconds_since(t0);
    man.write(dir);
    return kOk;
}

// --------------------------------------------------------------------------
// bounds
// --------------------------------------------------------------------------

struct BoundsArgs {
    std::string s;
    int ell_max = 4;
    int radius = 6;
    double budget = kBlockBudget;
    std::string dump_block;
};

int cmd_bounds(const Globals& g, const std::string& file, const BoundsArgs& a) {
    const auto t0 = std::chrono::steady_clock::now();
    const SchottkyData data = load_valid(file);
    const int m = g.truncation > 0 ? g.truncation : 8;
    const BergmanBasis basis(data, m);
    const cplx s = a.s.empty() ? cplx{bowen_dim(basis).delta / 2 + 0.2, 0.0} : parse_complex(a.s, "--s");
    if (a.ell_max < 1) throw ParseError("bounds: --ell-max must be >= 1");
    if (a.radius < 0) throw ParseError("bounds: --radius must be >= 0");

    const fs::path dir = output_dir(g);
    std::vector<std::string> artifacts{"bounds.csv"};
    if (!a.dump_block.empty()) {
        const auto v = parse_list<int>(a.dump_block, 2, "--dump-block");
        const BuchholzBlock blk = buchholz_block(v[0], v[1], s, basis);
        io::write_matrix(dir / "buchholz_block.bin", blk.to_dense(a.budget));
        artifacts.push_back("buchholz_block.bin");
    }
    const CompressedRegularRep reg(data.alphabet(), a.radius);
    io::CsvWriter csv(dir / "bounds.csv", {"ell", "s_re", "s_im", "bound", "lhs_compressed", "fallback_flag"});
    for (int ell = 1; ell <= a.ell_max; ++ell) {
        const BuchholzResult b = buchholz_bound(ell, s, basis, a.budget);
        const double lhs = compressed_limit_norm(assemble_tws_sphere(ell, s, basis), reg, m);
        csv.row(ell, s.real(), s.imag(), b.bound, lhs, b.fallback);
        std::cout << "ell " << ell << " bound " << io::format_double(b.bound) << " compressed "
                  << io::format_double(lhs) << (b.fallback ? " (HS fallback)" : "") << "\n";
    }
    io::Manifest man = start_manifest(g, "bounds", file);
    man.parameters = json{{"s", {s.real(), s.imag()}},
                          {"ell_max", a.ell_max},
                          {"radius", a.radius},
                          {"budget", a.budget},
                          {"truncation", m}};
    man.artifacts = artifacts;
    man.wall_time_s = seconds_since(t0);
    man.write(dir);
    return kOk;
}

// --------------------------------------------------------------------------
// norm-decay
// --------------------------------------------------------------------------

struct DecayArgs {
    std::string s;
    int ell_max = 12;
    int n = 1;
    bool dump_matrix = false;
};

int cmd_norm_decay(const Globals& g, const std::string& file, const DecayArgs& a) {
    const auto t0 = std::chrono::steady_clock::now();
    const SchottkyData data = load_valid(file);
    const int m = g.truncation > 0 ? g.truncation : 8;
    const BergmanBasis basis(data, m);
    const cplx s = a.s.empty() ? cplx{bowen_dim(basis).delta / 2 + 0.2, 0.0} : parse_complex(a.s, "--s");
    if (a.ell_max < 1) throw ParseError("norm-decay: --ell-max must be >= 1");
    if (a.n < 1) throw ParseError("norm-decay: --n must be >= 1");

    const fs::path dir = output_dir(g);
    std::vector<std::string> artifacts{"norm_decay.csv"};
    const PermutationRep perm = sample_hom(a.n, data.rank(), g.seed);
    io::CsvWriter csv(dir / "norm_decay.csv", {"ell", "s_re", "s_im", "norm"});
    const MatrixC base = a.n == 1 ? base_transfer(s, 1, basis) : MatrixC();
    MatrixC power = base;
    for (int ell = 1; ell <= a.ell_max; ++ell) {
        double nrm = 0.0;
        if (a.n == 1) {
            if (ell > 1) power = base * power;
            nrm = operator_norm(power);
        } else {
            nrm = twisted_power_norm_iterative(perm, s, ell, basis);
        }
        csv.row(ell, s.real(), s.imag(), nrm);
        std::cout << "ell " << ell << " norm " << io::format_double(nrm) << "\n";
    }
    if (a.dump_matrix) {
        const Representation rep = a.n == 1 ? Representation::trivial(data.alphabet()) : new_representation(perm);
        io::write_matrix(dir / "transfer.bin", assemble_transfer(s, rep, 1, basis).entries);
        artifacts.push_back("transfer.bin");
    }
    io::Manifest man = start_manifest(g, "norm-decay", file);
    man.parameters = json{{"s", {s.real(), s.imag()}}, {"ell_max", a.ell_max}, {"n", a.n}, {"truncation", m}};
    man.seeds = {g.seed};
    man.artifacts = artifacts;
    man.wall_time_s = seconds_since(t0);
    man.write(dir);
    return kOk;
}

void print_refusal(const RefusalError& e) {
    std::cerr << json{{"error", "refusal"}, {"reason", e.reason()}, {"message", e.what()}}.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    Globals g;
    g.argv.assign(argv, argv + argc);

    CLI::App app{"Transfer operators, resonances and random covers of Schottky surfaces"};
    app.require_subcommand(1);
    app.fallthrough();
    app.add_option("--out", g.out, "Output directory (default: $SCHOTTKY_LAB_OUT, else ./schottky-lab-out)");
    app.add_option("--jobs", g.jobs, "Worker threads")->check(CLI::Range(1, 1024));
    app.add_option("--seed", g.seed, "Master seed (unsigned 64-bit)");
    app.add_option("--truncation", g.truncation, "Per-disk truncation degree M")->check(CLI::Range(1, 256));

    std::string file;
    std::string config;

    auto* validate = app.add_subcommand("validate", "Check the Schottky conditions for a data file");
    validate->add_option("file", file, "Schottky JSON file")->required();

    double tol = 1e-10;
    auto* dim = app.add_subcommand("dim", "Compute the limit-set dimension");
    dim->add_option("file", file, "Schottky JSON file")->required();
    dim->add_option("--tol", tol, "Residual tolerance for lambda(delta) = 1")->check(CLI::Range(1e-12, 1e-2));
    dim->add_option("--config", config, "Strict JSON config");

    ScanArgs sa;
    auto* scan = app.add_subcommand("scan", "Locate zeros of the Fredholm determinant in a rectangle");
    scan->add_option("file", file, "Schottky JSON file")->required();
    scan->add_option("--rect", sa.rect, "re_min,re_max,im_min,im_max");
    scan->add_option("--grid", sa.grid, "n_re,n_im (default 40 cells per unit length)");
    scan->add_option("--n", sa.n, "Cover degree; n > 1 scans the new part of a random cover");
    scan->add_option("--ell", sa.ell, "First certificate power")->check(CLI::Range(1, 1024));
    scan->add_option("--ell-cap", sa.ell_cap, "Certificate power cap")->check(CLI::Range(1, 1024));
    scan->add_option("--refine-tol", sa.refine_tol, "Residual target of the Newton polish");
    scan->add_flag("--certificate", sa.certificate, "Also run the norm certificate");
    scan->add_option("--config", config, "Strict JSON config");

    CoverArgs ca;
    auto* cover = app.add_subcommand("cover", "Random-cover Monte-Carlo experiment");
    cover->add_option("file", file, "Schottky JSON file")->required();
    cover->add_option("--n", ca.n_list, "Comma-separated cover degrees");
    cover->add_option("--trials", ca.trials, "Trials per degree")->check(CLI::Range(1, 100000));
    cover->add_option("--rect", ca.rect, "re_min,re_max,im_min,im_max (default [d/2+0.1, d+0.1] x [-2, 2])");
    cover->add_option("--grid", ca.grid, "Initial certificate/scan grid n_re,n_im");
    cover->add_option("--ell", ca.ell, "First certificate power")->check(CLI::Range(1, 1024));
    cover->add_option("--ell-cap", ca.ell_cap, "Certificate power cap")->check(CLI::Range(1, 1024));
    cover->add_option("--config", config, "Strict JSON config");

    BoundsArgs ba;
    auto* bounds = app.add_subcommand("bounds", "Buchholz bounds and regular-representation compressions");
    bounds->add_option("file", file, "Schottky JSON file")->required();
    bounds->add_option("--s", ba.s, "re,im (default delta/2 + 0.2)");
    bounds->add_option("--ell-max", ba.ell_max, "Largest word length");
    bounds->add_option("--radius", ba.radius, "Compression radius R");
    bounds->add_option("--budget", ba.budget, "Block budget in matrix entries");
    bounds->add_option("--dump-block", ba.dump_block, "ell,j: write R(j, ell-j) as a dense binary matrix");
    bounds->add_option("--config", config, "Strict JSON config");

    DecayArgs da;
    auto* decay = app.add_subcommand("norm-decay", "Operator norms of transfer-operator powers versus ell");
    decay->add_option("file", file, "Schottky JSON file")->required();
    decay->add_option("--s", da.s, "re,im (default delta/2 + 0.2)");
    decay->add_option("--ell-max", da.ell_max, "Largest power");
    decay->add_option("--n", da.n, "Cover degree; n > 1 uses the new part of a random cover");
    decay->add_flag("--dump-matrix", da.dump_matrix, "Write the ell = 1 matrix as transfer.bin");
    decay->add_option("--config", config, "Strict JSON config");

    try {
        try {
            app.parse(argc, argv);
        } catch (const CLI::Success& e) {
            return app.exit(e);
        } catch (const CLI::ParseError& e) {
            app.exit(e);
            return kParse;
        }
        for (CLI::App* sub : app.get_subcommands()) {
            if (!config.empty()) apply_config(sub, config);
        }
        if (g.jobs < 1) throw ParseError("--jobs must be >= 1");
        if (*validate) return cmd_validate(g, file);
        if (*dim) return cmd_dim(g, file, tol);
        if (*scan) return cmd_scan(g, file, sa);
        if (*cover) return cmd_cover(g, file, ca);
        if (*bounds) return cmd_bounds(g, file, ba);
        if (*decay) return cmd_norm_decay(g, file, da);
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kParse;
    } catch (const CLI::Error& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kParse;
    } catch (const GeometryError& e) {
        std::cerr << "invalid geometry: " << e.what() << "\n";
        return kGeometry;
    } catch (const RefusalError& e) {
        print_refusal(e);
        return kRefusal;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kNumerical;
    }
    return kOk;
}
