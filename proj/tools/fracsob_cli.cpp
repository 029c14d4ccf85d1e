// Command-line front end. Talks to the library exclusively through the C API
// in fracsob.h. Exit codes: 0 pass, 1 experiment fail, 2 config error,
// 3 numerical error.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "fracsob.h"

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.16e", v);
    return buf;
}

[[noreturn]] void die(int code, const std::string& message) {
    std::cerr << "error: " << message << "\n";
    std::exit(code);
}

int map_status(int status) {
    switch (status) {
        case FS_OK: return 0;
        case FS_FAIL: return 1;
        case FS_ERR_CONFIG: return 2;
        case FS_ERR_NUMERIC: return 3;
        default: return 3;
    }
}

void check(int status) {
    if (status != FS_OK) die(map_status(status), fs_last_error());
}

void write_output(const std::string& path, const std::string& content) {
    if (path.empty()) {
        std::cout << content;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    out << content;
    if (!out) die(3, "cannot write " + path);
}

struct GridArg {
    int dim = 1;
    int N = 64;
};

GridArg parse_grid(const std::string& text) {
    GridArg g;
    auto colon = text.find(':');
    if (colon == std::string::npos) die(2, "grid must look like <dim>:<N>, e.g. 1:64");
    try {
        g.dim = std::stoi(text.substr(0, colon));
        g.N = std::stoi(text.substr(colon + 1));
    } catch (const std::exception&) {
        die(2, "bad grid '" + text + "'");
    }
    return g;
}

struct Handles {
    fs_grid* grid = nullptr;
    std::vector<fs_func*> fns;
    ~Handles() {
        for (fs_func* f : fns) fs_func_destroy(f);
        fs_grid_destroy(grid);
    }
};

void make_functions(Handles& h, const GridArg& g, const std::vector<std::string>& fn_specs) {
    check(fs_grid_create(g.dim, g.N, &h.grid));
    for (const std::string& spec : fn_specs) {
        fs_func* f = nullptr;
        check(fs_func_synthesize(h.grid, spec.c_str(), &f));
        h.fns.push_back(f);
    }
}

// --config file: JSON object whose keys mirror the flags; explicitly passed
// flags take precedence. Unknown keys are rejected.
struct FileConfig {
    nlohmann::json j = nlohmann::json::object();

    void load(const std::string& path) {
        std::ifstream in(path);
        if (!in) die(2, "cannot open config file '" + path + "'");
        try {
            in >> j;
        } catch (const std::exception& e) {
            die(2, std::string("bad config JSON: ") + e.what());
        }
        if (!j.is_object()) die(2, "config file must contain a JSON object");
    }

    template <class T>
    void fill(const CLI::Option* opt, const char* key, T& target) {
        if (!j.contains(key)) return;
        if (opt == nullptr || opt->count() == 0) {  // an explicit flag wins
            try {
                target = j.at(key).get<T>();
            } catch (const std::exception& e) {
                die(2, std::string("bad config value for '") + key + "': " + e.what());
            }
        }
        j.erase(key);
    }

    void reject_unknown() {
        if (!j.empty()) die(2, "unknown config key '" + j.items().begin().key() + "'");
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fractional-Sobolev numerics on periodic grids"};
    app.require_subcommand(1);
    app.fallthrough();  // allow --config after the subcommand name

    std::string config_path;
    app.add_option("--config", config_path, "JSON config file; flags override its keys");

    std::string grid_text = "1:64";
    std::vector<std::string> fn_specs;
    std::vector<std::string> space_specs;
    std::string out_path;
    std::string op_spec;
    std::string couple_spec = "L1-Linf";
    int threads = 1;

    // experiment parameters
    std::string tag;
    int exp_n = 1, exp_N = 64, ensemble = 50;
    double s = 0.5, t = 0.0, p = 2.0, q = 0.0, mu = 0.0, s0 = 0.0, s1 = 0.0;
    double tol_identity = 1e-10, tol_drift = 0.25;
    std::uint64_t seed = 42;
    bool no_refine = false;
    std::string format = "json";

    auto* cmd_norm = app.add_subcommand("norm", "evaluate norms: one row per (fn, space)");
    auto* norm_grid = cmd_norm->add_option("--grid", grid_text);
    auto* norm_fn = cmd_norm->add_option("--fn", fn_specs, "function spec (repeatable)");
    auto* norm_space = cmd_norm->add_option("--space", space_specs, "space spec (repeatable)");
    auto* norm_out = cmd_norm->add_option("--out", out_path);

    auto* cmd_pot = app.add_subcommand("potential", "apply a multiplier operator");
    auto* pot_grid = cmd_pot->add_option("--grid", grid_text);
    auto* pot_fn = cmd_pot->add_option("--fn", fn_specs);
    auto* pot_op = cmd_pot->add_option("--op", op_spec,
                                       "bessel:s=..[,t=..] | riesz:s=.. | rieszt:j=.. | "
                                       "dgrad:s=..,j=..");
    auto* pot_out = cmd_pot->add_option("--out", out_path);

    auto* cmd_kcurve = app.add_subcommand("kcurve", "K-functional curve as CSV");
    auto* kc_grid = cmd_kcurve->add_option("--grid", grid_text);
    auto* kc_fn = cmd_kcurve->add_option("--fn", fn_specs);
    auto* kc_couple = cmd_kcurve->add_option(
        "--couple", couple_spec, "L1-Linf | Lp-W1p:p=.. | L2-Hs2:s=.. (+,tmin=..,tmax=..)");
    auto* kc_out = cmd_kcurve->add_option("--out", out_path);

    auto* cmd_rearr = app.add_subcommand("rearrange", "decreasing rearrangement as CSV");
    auto* re_grid = cmd_rearr->add_option("--grid", grid_text);
    auto* re_fn = cmd_rearr->add_option("--fn", fn_specs);
    auto* re_out = cmd_rearr->add_option("--out", out_path);

    auto* cmd_exp = app.add_subcommand("experiment", "run one theorem-verification suite");
    auto* ex_tag = cmd_exp->add_option("--tag", tag, "suite tag, e.g. FSET-subcritical");
    auto* ex_n = cmd_exp->add_option("--n", exp_n);
    auto* ex_N = cmd_exp->add_option("--N", exp_N);
    auto* ex_s = cmd_exp->add_option("--s", s);
    auto* ex_t = cmd_exp->add_option("--t", t);
    auto* ex_p = cmd_exp->add_option("--p", p);
    auto* ex_q = cmd_exp->add_option("--q", q);
    auto* ex_mu = cmd_exp->add_option("--mu", mu);
    auto* ex_s0 = cmd_exp->add_option("--s0", s0);
    auto* ex_s1 = cmd_exp->add_option("--s1", s1);
    auto* ex_seed = cmd_exp->add_option("--seed", seed);
    auto* ex_ens = cmd_exp->add_option("--seeds,--ensemble", ensemble, "random member count");
    auto* ex_thr = cmd_exp->add_option("--threads", threads);
    auto* ex_ti = cmd_exp->add_option("--tol-identity", tol_identity);
    auto* ex_td = cmd_exp->add_option("--tol-drift", tol_drift);
    auto* ex_nr = cmd_exp->add_flag("--no-refine", no_refine);
    auto* ex_fmt = cmd_exp->add_option("--format", format, "json | csv | both");
    auto* ex_out = cmd_exp->add_option("--out", out_path, "output directory");

    auto* cmd_suite = app.add_subcommand("suite-all", "run the full default battery");
    auto* su_seed = cmd_suite->add_option("--seed", seed);
    auto* su_N = cmd_suite->add_option("--N", exp_N);
    auto* su_thr = cmd_suite->add_option("--threads", threads);
    auto* su_out = cmd_suite->add_option("--out", out_path, "report directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    FileConfig file;
    if (!config_path.empty()) file.load(config_path);

    if (cmd_norm->parsed()) {
        file.fill(norm_grid, "grid", grid_text);
        file.fill(norm_fn, "fn", fn_specs);
        file.fill(norm_space, "space", space_specs);
        file.fill(norm_out, "out", out_path);
        file.reject_unknown();
        if (fn_specs.empty() || space_specs.empty())
            die(2, "norm needs at least one --fn and one --space");
        Handles h;
        make_functions(h, parse_grid(grid_text), fn_specs);
        std::string table = "fn,space,value\n";
        for (std::size_t i = 0; i < h.fns.size(); ++i) {
            for (const std::string& sp : space_specs) {
                double value = 0.0;
                check(fs_norm(h.fns[i], sp.c_str(), &value));
                table += fn_specs[i] + "," + sp + "," + fmt17(value) + "\n";
            }
        }
        write_output(out_path, table);
        return 0;
    }

    if (cmd_pot->parsed()) {
        file.fill(pot_grid, "grid", grid_text);
        file.fill(pot_fn, "fn", fn_specs);
        file.fill(pot_op, "op", op_spec);
        file.fill(pot_out, "out", out_path);
        file.reject_unknown();
        if (fn_specs.size() != 1 || op_spec.empty())
            die(2, "potential needs exactly one --fn and an --op");
        Handles h;
        GridArg g = parse_grid(grid_text);
        make_functions(h, g, fn_specs);
        fs_func* result = nullptr;
        check(fs_potential(h.fns[0], op_spec.c_str(), &result));
        h.fns.push_back(result);
        const size_t count = fs_func_size(result);
        std::vector<double> re(count), im(count);
        check(fs_func_samples(result, re.data(), im.data()));
        std::string csv = g.dim == 1 ? "x,re,im\n" : "x0,x1,re,im\n";
        for (size_t i = 0; i < count; ++i) {
            if (g.dim == 1) {
                csv += fmt17(static_cast<double>(i) / g.N);
            } else {
                csv += fmt17(static_cast<double>(i / static_cast<size_t>(g.N)) / g.N);
                csv += ',';
                csv += fmt17(static_cast<double>(i % static_cast<size_t>(g.N)) / g.N);
            }
            csv += ',';
            csv += fmt17(re[i]);
            csv += ',';
            csv += fmt17(im[i]);
            csv += '\n';
        }
        write_output(out_path, csv);
        return 0;
    }

    if (cmd_kcurve->parsed()) {
        file.fill(kc_grid, "grid", grid_text);
        file.fill(kc_fn, "fn", fn_specs);
        file.fill(kc_couple, "couple", couple_spec);
        file.fill(kc_out, "out", out_path);
        file.reject_unknown();
        if (fn_specs.size() != 1) die(2, "kcurve needs exactly one --fn");
        Handles h;
        make_functions(h, parse_grid(grid_text), fn_specs);
        char* csv = nullptr;
        check(fs_kcurve_csv(h.fns[0], couple_spec.c_str(), &csv));
        std::string text = csv;
        fs_string_free(csv);
        write_output(out_path, text);
        return 0;
    }

    if (cmd_rearr->parsed()) {
        file.fill(re_grid, "grid", grid_text);
        file.fill(re_fn, "fn", fn_specs);
        file.fill(re_out, "out", out_path);
        file.reject_unknown();
        if (fn_specs.size() != 1) die(2, "rearrange needs exactly one --fn");
        Handles h;
        make_functions(h, parse_grid(grid_text), fn_specs);
        char* csv = nullptr;
        check(fs_rearrangement_csv(h.fns[0], &csv));
        std::string text = csv;
        fs_string_free(csv);
        write_output(out_path, text);
        return 0;
    }

    if (cmd_exp->parsed()) {
        file.fill(ex_tag, "tag", tag);
        file.fill(ex_n, "n", exp_n);
        file.fill(ex_N, "N", exp_N);
        file.fill(ex_s, "s", s);
        file.fill(ex_t, "t", t);
        file.fill(ex_p, "p", p);
        file.fill(ex_q, "q", q);
        file.fill(ex_mu, "mu", mu);
        file.fill(ex_s0, "s0", s0);
        file.fill(ex_s1, "s1", s1);
        file.fill(ex_seed, "seed", seed);
        file.fill(ex_ens, "ensemble", ensemble);
        file.fill(ex_thr, "threads", threads);
        file.fill(ex_ti, "tol_identity", tol_identity);
        file.fill(ex_td, "tol_drift", tol_drift);
        file.fill(ex_nr, "no_refine", no_refine);
        file.fill(ex_fmt, "format", format);
        file.fill(ex_out, "out", out_path);
        file.reject_unknown();
        if (tag.empty()) die(2, "experiment needs --tag");
        if (format != "json" && format != "csv" && format != "both")
            die(2, "--format must be json, csv or both");

        nlohmann::json cfg;
        cfg["tag"] = tag;
        cfg["n"] = exp_n;
        cfg["N"] = exp_N;
        cfg["s"] = s;
        cfg["t"] = t;
        cfg["p"] = p;
        cfg["q"] = q;
        cfg["mu"] = mu;
        cfg["s0"] = s0;
        cfg["s1"] = s1;
        cfg["seed"] = seed;
        cfg["ensemble"] = ensemble;
        cfg["threads"] = threads;
        cfg["tol_identity"] = tol_identity;
        cfg["tol_drift"] = tol_drift;
        cfg["refine"] = !no_refine;

        char* report = nullptr;
        char* csv = nullptr;
        int pass = 0;
        check(fs_experiment_run(cfg.dump().c_str(), &report, &csv, &pass));
        std::string report_text = report, csv_text = csv;
        fs_string_free(report);
        fs_string_free(csv);

        if (out_path.empty()) {
            std::cout << (format == "csv" ? csv_text : report_text);
        } else {
            std::filesystem::create_directories(out_path);
            const std::string stem = (std::filesystem::path(out_path) / tag).string();
            if (format != "csv") write_output(stem + ".report.json", report_text);
            if (format != "json") write_output(stem + ".per_member.csv", csv_text);
        }
        if (pass == 0) {
            std::cerr << tag << ": FAIL\n";
            return 1;
        }
        return 0;
    }

    if (cmd_suite->parsed()) {
        file.fill(su_seed, "seed", seed);
        file.fill(su_N, "N", exp_N);
        file.fill(su_thr, "threads", threads);
        file.fill(su_out, "out", out_path);
        file.reject_unknown();
        nlohmann::json cfg;
        cfg["seed"] = seed;
        cfg["N"] = exp_N;
        cfg["threads"] = threads;
        char* summary = nullptr;
        int all_pass = 0;
        check(fs_suite_all(cfg.dump().c_str(), out_path.c_str(), &summary, &all_pass));
        std::string text = summary;
        fs_string_free(summary);
        std::cout << text;
        return all_pass == 1 ? 0 : 1;
    }

    return 2;
}
