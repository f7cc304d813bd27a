// Batch front end: condition checks, transforms, sweeps, necessity and constant
// campaigns, grid Poincare checks, and artifact reports.
//
// Exit status: 0 success, 1 result disagrees with --expect (or a necessity
// campaign is not confirmed), 2 usage or input error.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ckn/json_io.hpp"

namespace fs = std::filesystem;
using namespace ckn;

namespace {

struct Mismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot read '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Json parse_json(const std::string& text, const std::string& what) {
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw InputError(what + " is not valid JSON: " + e.what());
    }
}

/// Inline JSON object or a path to one.
ParameterSet load_tuple(const std::string& arg) {
    if (arg.empty()) throw InputError("--tuple is required");
    auto first = arg.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && arg[first] == '{') return parameter_set_from_json(parse_json(arg, "--tuple"));
    return parameter_set_from_json(parse_json(read_file(arg), "'" + arg + "'"));
}

double parse_real(const std::string& text, const std::string& what) {
    if (text == "inf") return kInfinity;
    try {
        return Rational::parse(text).to_double();
    } catch (const InputError&) {
    }
    double v = 0;
    auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
        throw InputError("bad number '" + text + "' for " + what);
    }
    return v;
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, sep)) parts.push_back(item);
    if (!text.empty() && text.back() == sep) parts.emplace_back();
    return parts;
}

/// t0:ratio:count
std::vector<double> parse_grid(const std::string& spec) {
    auto parts = split(spec, ':');
    if (parts.size() != 3) throw InputError("--grid expects t0:ratio:count");
    double count = parse_real(parts[2], "grid count");
    if (count != std::floor(count) || count < 1 || count > 10000) throw InputError("grid count must be a positive integer");
    return geometric_grid(parse_real(parts[0], "grid t0"), parse_real(parts[1], "grid ratio"), static_cast<int>(count));
}

std::uint64_t fnv1a(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i, v >>= 4) s[static_cast<std::size_t>(i)] = digits[v & 0xf];
    return s;
}

/// Writes artifacts into one directory. finish() digests every file in it
/// except digest.json itself, in name order.
class Artifacts {
public:
    explicit Artifacts(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

    void text(const std::string& name, const std::string& content) {
        std::ofstream out(dir_ / name, std::ios::binary);
        if (!out) throw InputError("cannot write '" + (dir_ / name).string() + "'");
        out << content;
    }

    void json(const std::string& name, const Json& j) { text(name, j.dump(2) + "\n"); }

    void finish() {
        std::vector<std::string> names;
        for (const auto& entry : fs::directory_iterator(dir_)) {
            auto name = entry.path().filename().string();
            if (entry.is_regular_file() && name != "digest.json") names.push_back(name);
        }
        std::sort(names.begin(), names.end());
        Json files = Json::array();
        for (const auto& name : names) {
            auto content = read_file(dir_ / name);
            files.push_back(Json{{"file", name}, {"bytes", content.size()}, {"fnv1a64", hex64(fnv1a(content))}});
        }
        text("digest.json", Json{{"files", files}}.dump(2) + "\n");
    }

private:
    fs::path dir_;
};

std::string gnuplot_script(const std::string& csv, const std::string& title, bool logx) {
    std::ostringstream gp;
    gp << "set datafile separator ','\n"
       << "set key autotitle columnhead\n"
       << (logx ? "set logscale x 2\n" : "") << "set logscale y\n"
       << "set xlabel 't'\n"
       << "set ylabel 'ratio'\n"
       << "set title '" << title << "'\n"
       << "plot '" << csv << "' using 1:5 with linespoints\n";
    return gp.str();
}

void emit_sweep(Artifacts& out, const std::string& stem, const SweepResult& r) {
    std::ostringstream csv;
    write_sweep_csv(csv, r);
    out.text(stem + ".csv", csv.str());
    out.text(stem + ".gp", gnuplot_script(stem + ".csv", std::string(to_string(r.kind)), r.kind != FamilyKind::dyadic_sum));
}

struct Options {
    std::string tuple;
    std::string family;
    std::vector<std::string> families;
    std::string grid;
    std::string domain = "FULL_SPACE";
    std::string out = "ckn_out";
    int depth = 0;
    std::uint64_t seed = 1;
    std::string expect;
    std::string transform = "BAR";
    // poincare
    std::string lambda = "1";
    std::string p = "2";
    std::string input;
    std::string spike;
    std::string flat;
    std::string corpus;
    std::string q;
    std::string constant;
};

SweepOptions sweep_options(const Options& o) {
    SweepOptions opt;
    opt.domain = Domain::parse(o.domain);
    if (o.depth < 0 || o.depth > 6) throw InputError("--depth must lie in 0..6");
    opt.quad.level = o.depth;
    return opt;
}

Json base(const char* command, const ParameterSet& P) { return Json{{"command", command}, {"tuple", to_json(P)}}; }

int run_check(const Options& o) {
    auto P = load_tuple(o.tuple);
    auto report = check(P);
    Json j = base("check", P);
    j["verdict"] = std::string(to_string(report.verdict));
    j["regime"] = report.verdict == Verdict::invalid_standing ? Json(nullptr) : Json(std::string(to_string(classify_regime(P))));
    j["report"] = to_json(report);
    Artifacts out(o.out);
    out.json("check.json", j);
    out.finish();
    std::cout << "verdict " << to_string(report.verdict) << "\n";
    if (!o.expect.empty() && o.expect != to_string(report.verdict)) {
        throw Mismatch("expected " + o.expect + ", got " + std::string(to_string(report.verdict)));
    }
    return 0;
}

int run_transform(const Options& o) {
    auto P = load_tuple(o.tuple);
    Json j = base("transform", P);
    if (o.transform == "BAR") {
        j["result"] = to_json(bar_transform(P));
    } else if (o.transform == "HAT") {
        j["result"] = to_json(hat_transform(P));
    } else if (o.transform == "RADIAL_FLATTEN") {
        j["result"] = to_json(radial_flatten(P));
    } else if (o.transform == "SPLIT") {
        j["result"] = to_json(split_parameters(P));
    } else if (o.transform == "CHANGE_2D") {
        j["result"] = Json{{"kind", "CHANGE_2D"}, {"alpha", P.alpha.str()}, {"exponent", anisotropic_2d_change(P.alpha).str()}};
    } else {
        throw InputError("unknown transform '" + o.transform + "' (BAR, HAT, RADIAL_FLATTEN, SPLIT, CHANGE_2D)");
    }
    Artifacts out(o.out);
    out.json("transform.json", j);
    out.finish();
    std::cout << "transform " << o.transform << " ok\n";
    return 0;
}

int run_sweep(const Options& o) {
    auto P = load_tuple(o.tuple);
    if (o.family.empty()) throw InputError("sweep needs --family");
    auto kind = family_kind_from_string(o.family);
    auto opt = sweep_options(o);
    auto grid = o.grid.empty() ? default_grid(kind) : parse_grid(o.grid);
    auto result = sweep(P, kind, grid, opt);
    Json j = base("sweep", P);
    j["domain"] = to_json(opt.domain);
    j["depth"] = o.depth;
    try {
        auto pred = predict_slope(P, kind);
        j["predicted"] = pred.str();
        j["blowup_predicted"] = blows_up(kind, pred.to_double());
    } catch (const DomainError& e) {
        j["predicted"] = nullptr;
        j["note"] = e.what();
    }
    j["verdict"] = std::string(to_string(check(P).verdict));
    j["sweep"] = to_json(result);
    Artifacts out(o.out);
    std::string stem = "sweep_" + std::string(to_string(kind));
    emit_sweep(out, stem, result);
    out.json("sweep.json", j);
    out.finish();
    std::cout << to_string(kind) << " slope " << format_double(result.slope) << "\n";
    return 0;
}

int run_necessity(const Options& o) {
    auto P = load_tuple(o.tuple);
    auto report = verify_necessity(P, sweep_options(o));
    Json j = base("necessity", P);
    j["domain"] = o.domain;
    j["depth"] = o.depth;
    j["report"] = to_json(report);
    Artifacts out(o.out);
    for (const auto& e : report.entries) {
        if (e.sweep) emit_sweep(out, "necessity_" + std::string(to_string(e.condition)) + "_" + std::string(to_string(e.family)), *e.sweep);
    }
    out.json("necessity.json", j);
    out.finish();
    for (const auto& e : report.entries) {
        std::cout << to_string(e.condition) << " " << to_string(e.family) << " "
                  << (e.predicted ? e.predicted->str() : std::string("n/a")) << " fitted " << format_double(e.fitted)
                  << (e.confirmed ? " confirmed" : " NOT confirmed") << "\n";
    }
    if (!report.all_confirmed()) throw Mismatch("necessity not confirmed for every failing condition");
    return 0;
}

int run_constant(const Options& o) {
    auto P = load_tuple(o.tuple);
    std::vector<FamilyKind> kinds;
    for (const auto& f : o.families) kinds.push_back(family_kind_from_string(f));
    if (kinds.empty()) kinds = all_family_kinds();
    auto est = estimate_constant(P, kinds, sweep_options(o));
    Json j = base("constant", P);
    j["domain"] = o.domain;
    j["depth"] = o.depth;
    j["estimate"] = to_json(est);
    Artifacts out(o.out);
    out.json("constant.json", j);
    out.finish();
    std::cout << "constant >= " << format_double(est.value) << " (" << to_string(est.family) << ")\n";
    return 0;
}

GridFunction load_grid(const std::string& path) {
    std::string bytes = read_file(path);
    std::istringstream in(bytes);
    if (bytes.rfind("CKNGRID1", 0) == 0) return read_binary(in);
    return read_csv(in);
}

int run_poincare(const Options& o) {
    double lambda = parse_real(o.lambda, "--lambda");
    double p = parse_real(o.p, "--p");
    int sources = !o.input.empty() + !o.spike.empty() + !o.flat.empty() + !o.corpus.empty();
    if (sources != 1) throw InputError("poincare needs exactly one of --input, --spike, --flat, --corpus");
    Json j{{"command", "poincare"}, {"lambda", number(lambda)}, {"p", std::isinf(p) ? Json("inf") : number(p)}};
    std::vector<GridFunction> grids;
    if (!o.input.empty()) {
        j["source"] = Json{{"kind", "input"}, {"file", fs::path(o.input).filename().string()}};
        grids.push_back(load_grid(o.input));
    } else if (!o.spike.empty()) {
        auto parts = split(o.spike, ':');
        if (parts.size() != 2) throw InputError("--spike expects n:eps");
        int n = static_cast<int>(parse_real(parts[0], "spike n"));
        double eps = parse_real(parts[1], "spike eps");
        auto s = spike_counterexample(n, lambda, p, eps);
        j["source"] = Json{{"kind", "spike"}, {"n", n}, {"eps", number(eps)},
                           {"amplitude", number(s.amplitude)}, {"scaled_amplitude", number(s.scaled_amplitude)},
                           {"continuum_amplitude", number(s.continuum_amplitude)}};
        grids.push_back(std::move(s.w));
    } else if (!o.flat.empty()) {
        double e = parse_real(o.flat, "--flat");
        j["source"] = Json{{"kind", "flat"}, {"exponent", number(e)}, {"deviation_limit", number(flat_deviation_limit(lambda, p))}};
        grids.push_back(flat_counterexample(lambda, p, e));
    } else {
        auto parts = split(o.corpus, ':');
        if (parts.size() != 3) throw InputError("--corpus expects n:cells:count");
        int n = static_cast<int>(parse_real(parts[0], "corpus n"));
        auto cells = static_cast<std::size_t>(parse_real(parts[1], "corpus cells"));
        auto count = static_cast<std::size_t>(parse_real(parts[2], "corpus count"));
        if (cells < 1 || cells > 4096 || count < 1 || count > 100000) throw InputError("corpus size out of range");
        j["source"] = Json{{"kind", "corpus"}, {"n", n}, {"cells", cells}, {"count", count}, {"seed", o.seed}};
        for (const auto& f : smooth_positive_corpus(n, count, o.seed)) {
            auto g = GridFunction::uniform(n, cells);
            g.sample(f);
            grids.push_back(std::move(g));
        }
    }
    Json results = Json::array();
    double max_ratio = 0;
    for (const auto& g : grids) {
        auto r = grid_poincare_ratio(g, lambda, p);
        max_ratio = std::max(max_ratio, r.ratio);
        results.push_back(to_json(r));
    }
    j["results"] = results;
    j["max_ratio"] = number(max_ratio);
    if (!o.q.empty()) {
        double q = parse_real(o.q, "--q");
        double c = o.constant.empty() ? max_ratio : parse_real(o.constant, "--constant");
        if (o.constant.empty() && corollary_lambda(q) != lambda) {
            throw InputError("without --constant, --lambda must equal the corollary exponent for q");
        }
        Json cor = Json::array();
        bool all = true;
        for (const auto& g : grids) {
            auto r = corollary_bound(g, p, q, c);
            all = all && r.holds;
            cor.push_back(to_json(r));
        }
        j["corollary"] = Json{{"q", number(q)}, {"constant", number(c)}, {"all_hold", all}, {"reports", cor}};
    }
    Artifacts out(o.out);
    out.json("poincare.json", j);
    out.finish();
    std::cout << "max ratio " << format_double(max_ratio) << "\n";
    return 0;
}

/// Summarises the JSON artifacts already in --out.
int run_report(const Options& o) {
    fs::path dir(o.out);
    if (!fs::is_directory(dir)) throw InputError("report needs an existing --out directory");
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        auto name = entry.path().filename().string();
        if (entry.is_regular_file() && entry.path().extension() == ".json" && name != "digest.json" && name != "report.json") {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    Json items = Json::array();
    bool mismatch = false;
    for (const auto& f : files) {
        Json a = parse_json(read_file(f), f.filename().string());
        Json item{{"file", f.filename().string()}, {"command", a.value("command", "")}};
        if (a.contains("verdict")) item["verdict"] = a["verdict"];
        if (a.contains("report") && a["report"].contains("all_confirmed")) {
            item["all_confirmed"] = a["report"]["all_confirmed"];
            mismatch = mismatch || !a["report"]["all_confirmed"].get<bool>();
        }
        if (a.contains("sweep")) item["slope"] = a["sweep"]["slope"];
        if (a.contains("estimate")) item["constant"] = a["estimate"]["value"];
        if (a.contains("max_ratio")) item["max_ratio"] = a["max_ratio"];
        items.push_back(item);
    }
    Artifacts out(dir);
    out.json("report.json", Json{{"command", "report"}, {"artifacts", items}});
    out.finish();
    std::cout << items.size() << " artifacts\n";
    if (mismatch) throw Mismatch("a necessity campaign in the report is not confirmed");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Weighted interpolation inequality toolkit"};
    app.require_subcommand(1);
    Options o;

    auto add_common = [&](CLI::App* sub, bool tuple) {
        if (tuple) sub->add_option("--tuple", o.tuple, "parameter tuple: inline JSON object or file")->required();
        sub->add_option("--out", o.out, "output directory");
        sub->add_option("--seed", o.seed, "random seed");
    };
    auto add_quad = [&](CLI::App* sub) {
        sub->add_option("--domain", o.domain, "FULL_SPACE, BALL:R, CONE:r1:r2:eps, CONE_COMPLEMENT:eps, CYLINDER:delta:h, SHELL:k");
        sub->add_option("--depth", o.depth, "quadrature refinement level (each level doubles every cell count)");
    };

    auto* check_cmd = app.add_subcommand("check", "evaluate the conditions for a tuple");
    add_common(check_cmd, true);
    check_cmd->add_option("--expect", o.expect, "expected verdict")->check(CLI::IsMember({"HOLDS", "FAILS", "INVALID_STANDING"}));

    auto* transform_cmd = app.add_subcommand("transform", "apply a parameter transform");
    add_common(transform_cmd, true);
    transform_cmd->add_option("--kind", o.transform, "BAR, HAT, RADIAL_FLATTEN, SPLIT or CHANGE_2D");

    auto* sweep_cmd = app.add_subcommand("sweep", "sample the ratio along a family");
    add_common(sweep_cmd, true);
    add_quad(sweep_cmd);
    sweep_cmd->add_option("--family", o.family, "family kind")->required();
    sweep_cmd->add_option("--grid", o.grid, "geometric grid t0:ratio:count");

    auto* necessity_cmd = app.add_subcommand("necessity", "confirm blowup for every failing condition");
    add_common(necessity_cmd, true);
    add_quad(necessity_cmd);

    auto* constant_cmd = app.add_subcommand("constant", "lower bound for the best constant");
    add_common(constant_cmd, true);
    add_quad(constant_cmd);
    constant_cmd->add_option("--family", o.families, "restrict to these families");

    auto* poincare_cmd = app.add_subcommand("poincare", "grid nonlinear Poincare ratio");
    add_common(poincare_cmd, false);
    poincare_cmd->add_option("--lambda", o.lambda, "power-mean exponent");
    poincare_cmd->add_option("--p", o.p, "norm exponent (inf allowed)");
    poincare_cmd->add_option("--input", o.input, "grid file (CSV or CKNGRID1 binary)");
    poincare_cmd->add_option("--spike", o.spike, "spike construction n:eps");
    poincare_cmd->add_option("--flat", o.flat, "flat construction exponent");
    poincare_cmd->add_option("--corpus", o.corpus, "seeded corpus n:cells:count");
    poincare_cmd->add_option("--q", o.q, "also check the corollary with this q");
    poincare_cmd->add_option("--constant", o.constant, "corollary constant (default: the corpus maximum)");

    auto* report_cmd = app.add_subcommand("report", "summarise the artifacts in --out");
    add_common(report_cmd, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*check_cmd) return run_check(o);
        if (*transform_cmd) return run_transform(o);
        if (*sweep_cmd) return run_sweep(o);
        if (*necessity_cmd) return run_necessity(o);
        if (*constant_cmd) return run_constant(o);
        if (*poincare_cmd) return run_poincare(o);
        if (*report_cmd) return run_report(o);
    } catch (const Mismatch& e) {
        std::cerr << "mismatch: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
