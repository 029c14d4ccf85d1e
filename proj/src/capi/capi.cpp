#include "fracsob.h"

#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

#include "core/errors.hpp"
#include "core/experiments.hpp"
#include "core/grid.hpp"
#include "core/interpolation.hpp"
#include "core/norms.hpp"
#include "core/potentials.hpp"
#include "core/report_io.hpp"

using namespace fracsob;

struct fs_grid {
    PeriodicGrid grid;
};
struct fs_func {
    GridFunction fn;
};

namespace {

thread_local std::string g_last_error;

int fail(int code, const std::string& message) {
    g_last_error = message;
    return code;
}

template <class Fn>
int guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const ConfigError& e) {
        return fail(FS_ERR_CONFIG, e.what());
    } catch (const NumericError& e) {
        return fail(FS_ERR_NUMERIC, e.what());
    } catch (const std::exception& e) {
        return fail(FS_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(FS_ERR_INTERNAL, "unknown failure");
    }
}

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out != nullptr) std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

int require(bool cond, const char* what) {
    if (!cond) throw ConfigError(what);
    return FS_OK;
}

// tiny key=value scanner shared by the op and couple mini-formats
struct KvSpec {
    std::string kind;
    std::vector<std::pair<std::string, std::string>> kv;
    bool flag(const std::string& name) const {
        for (const auto& [k, v] : kv)
            if (k == name && v.empty()) return true;
        return false;
    }
    double num(const std::string& name, double fallback, bool* found = nullptr) const {
        for (const auto& [k, v] : kv)
            if (k == name && !v.empty()) {
                if (found != nullptr) *found = true;
                try {
                    return std::stod(v);
                } catch (const std::exception&) {
                    throw ConfigError("bad number for '" + name + "'");
                }
            }
        if (found != nullptr) *found = false;
        return fallback;
    }
};

KvSpec parse_kv_spec(const char* text) {
    KvSpec spec;
    std::string s = text != nullptr ? text : "";
    // the kind ends at ':' (parameters) or ',' (bare kind with options)
    auto cut = s.find_first_of(":,");
    spec.kind = s.substr(0, cut);
    if (cut == std::string::npos) return spec;
    std::string body = s.substr(cut + 1);
    std::size_t start = 0;
    while (start <= body.size()) {
        auto end = body.find(',', start);
        std::string part = body.substr(start, end - start);
        auto eq = part.find('=');
        if (eq == std::string::npos)
            spec.kv.emplace_back(part, "");
        else
            spec.kv.emplace_back(part.substr(0, eq), part.substr(eq + 1));
        if (end == std::string::npos) break;
        start = end + 1;
    }
    return spec;
}

}  // namespace

extern "C" {

const char* fs_last_error(void) { return g_last_error.c_str(); }

void fs_string_free(char* s) { std::free(s); }

int fs_grid_create(int dim, int points_per_axis, fs_grid** out) {
    return guarded([&] {
        require(out != nullptr, "null output handle");
        *out = new fs_grid{PeriodicGrid::make(dim, points_per_axis)};
        return FS_OK;
    });
}

void fs_grid_destroy(fs_grid* grid) { delete grid; }

int fs_grid_dim(const fs_grid* grid) { return grid != nullptr ? grid->grid.dim : 0; }

int fs_grid_points_per_axis(const fs_grid* grid) {
    return grid != nullptr ? grid->grid.points_per_axis : 0;
}

int fs_func_synthesize(const fs_grid* grid, const char* function_spec, fs_func** out) {
    return guarded([&] {
        require(grid != nullptr && function_spec != nullptr && out != nullptr,
                "null argument");
        FunctionSpec spec = parse_function_spec(function_spec);
        *out = new fs_func{synthesize(spec, grid->grid)};
        return FS_OK;
    });
}

void fs_func_destroy(fs_func* f) { delete f; }

size_t fs_func_size(const fs_func* f) {
    return f != nullptr ? f->fn.samples().size() : 0;
}

int fs_func_samples(const fs_func* f, double* re, double* im) {
    return guarded([&] {
        require(f != nullptr, "null function handle");
        const auto& s = f->fn.samples();
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (re != nullptr) re[i] = s[i].real();
            if (im != nullptr) im[i] = s[i].imag();
        }
        return FS_OK;
    });
}

int fs_norm(const fs_func* f, const char* space_spec, double* out) {
    return guarded([&] {
        require(f != nullptr && space_spec != nullptr && out != nullptr, "null argument");
        *out = space_norm(f->fn, SpaceSpec::parse(space_spec));
        return FS_OK;
    });
}

int fs_potential(const fs_func* f, const char* op_spec, fs_func** out) {
    return guarded([&] {
        require(f != nullptr && op_spec != nullptr && out != nullptr, "null argument");
        KvSpec op = parse_kv_spec(op_spec);
        const bool project = op.flag("project");
        if (op.kind == "bessel") {
            *out = new fs_func{bessel_potential(
                f->fn, {op.num("s", 0.0), op.num("t", 0.0)})};
        } else if (op.kind == "riesz") {
            *out = new fs_func{riesz_potential(f->fn, op.num("s", 0.5), project)};
        } else if (op.kind == "rieszt") {
            const int j = static_cast<int>(op.num("j", 0.0));
            auto comps = riesz_transform(f->fn, project);
            require(j >= 0 && j < static_cast<int>(comps.size()), "component out of range");
            *out = new fs_func{comps[static_cast<std::size_t>(j)]};
        } else if (op.kind == "dgrad") {
            const int j = static_cast<int>(op.num("j", 0.0));
            auto comps = fractional_gradient(f->fn, op.num("s", 0.5), project);
            require(j >= 0 && j < static_cast<int>(comps.size()), "component out of range");
            *out = new fs_func{comps[static_cast<std::size_t>(j)]};
        } else {
            throw ConfigError("unknown operator '" + op.kind + "'");
        }
        return FS_OK;
    });
}

int fs_bessel_kernel(double x_abs, double s, int n, double* out) {
    return guarded([&] {
        require(out != nullptr, "null output");
        *out = bessel_kernel(x_abs, s, n);
        return FS_OK;
    });
}

int fs_sequence_norm_lsq(const double* abs_values, size_t len, double s, double q,
                         double* out) {
    return guarded([&] {
        require(out != nullptr && (abs_values != nullptr || len == 0), "null argument");
        *out = sequence_norm_lsq(std::span<const double>(abs_values, len), s, q);
        return FS_OK;
    });
}

int fs_rearrangement_csv(const fs_func* f, char** csv_out) {
    return guarded([&] {
        require(f != nullptr && csv_out != nullptr, "null argument");
        Rearrangement r = decreasing_rearrangement(f->fn);
        std::string csv = "t_right,value\n";
        for (std::size_t i = 0; i < r.values.size(); ++i) {
            csv += format_float17(r.piece * static_cast<double>(i + 1));
            csv += ',';
            csv += format_float17(r.values[i]);
            csv += '\n';
        }
        *csv_out = dup_string(csv);
        return FS_OK;
    });
}

int fs_kcurve_csv(const fs_func* f, const char* couple_spec, char** csv_out) {
    return guarded([&] {
        require(f != nullptr && couple_spec != nullptr && csv_out != nullptr,
                "null argument");
        KvSpec cs = parse_kv_spec(couple_spec);
        const GridFunction& u = f->fn;

        double n0 = 0.0, n1 = 0.0;
        KCurve curve;
        bool with_envelope = false;
        double s_env = 0.0;

        const double tmin = cs.num("tmin", 1e-3);
        const double tmax = cs.num("tmax", 1e3);
        const int per_decade = static_cast<int>(cs.num("perdecade", 32.0));
        std::vector<double> ts = log_t_grid(tmin, tmax, per_decade);

        if (cs.kind == "L1-Linf") {
            curve = k_curve_l1_linf(u, ts);
            n0 = quadrature_lp(u, 1.0);
            n1 = quadrature_lp(u, kInf);
            curve.validate(n0, n1, 1e-10);
        } else if (cs.kind == "Lp-W1p") {
            const double p = cs.num("p", 2.0);
            NormCouple couple = couple_lp_w1p(u.grid(), p);
            curve = k_curve_numeric(couple, u.samples(), ts, 2e-2);
            n0 = couple.norm0.value(u.samples());
            n1 = couple.norm1.value(u.samples());
            curve.validate(n0, n1, 2e-2);
        } else if (cs.kind == "L2-Hs2") {
            s_env = cs.num("s", 0.5);
            with_envelope = true;
            NormCouple couple = couple_l2_hs2(u.grid(), s_env);
            curve = k_curve_numeric(couple, u.spectrum(), ts, 1e-3);
            n0 = couple.norm0.value(u.spectrum());
            n1 = couple.norm1.value(u.spectrum());
            curve.validate(n0, n1, 1e-2);
        } else {
            throw ConfigError("couple must be L1-Linf, Lp-W1p or L2-Hs2");
        }

        std::string csv = "t,K,split_norm0,split_norm1";
        if (with_envelope) csv += ",K2,sqrt2K2";
        csv += '\n';
        for (std::size_t i = 0; i < curve.t_grid.size(); ++i) {
            csv += format_float17(curve.t_grid[i]);
            csv += ',';
            csv += format_float17(curve.k_values[i]);
            csv += ',';
            csv += format_float17(curve.part0[i]);
            csv += ',';
            csv += format_float17(curve.part1[i]);
            if (with_envelope) {
                const double k2 = k2_envelope_p2(u, curve.t_grid[i], s_env);
                csv += ',';
                csv += format_float17(k2);
                csv += ',';
                csv += format_float17(k2 * 1.4142135623730950488);
            }
            csv += '\n';
        }
        *csv_out = dup_string(csv);
        return FS_OK;
    });
}

int fs_experiment_run(const char* config_json, char** report_json, char** member_csv,
                      int* pass) {
    return guarded([&] {
        require(config_json != nullptr, "null config");
        auto [tag, params] = parse_experiment_config(config_json);
        ExperimentReport rep = run_experiment(tag, params);
        if (report_json != nullptr) *report_json = dup_string(report_to_json(rep));
        if (member_csv != nullptr) *member_csv = dup_string(report_to_csv(rep));
        if (pass != nullptr) *pass = rep.pass ? 1 : 0;
        return FS_OK;
    });
}

int fs_suite_all(const char* config_json, const char* out_dir, char** summary_csv,
                 int* all_pass) {
    return guarded([&] {
        std::uint64_t seed = 42;
        int N = 64, threads = 1;
        if (config_json != nullptr && config_json[0] != '\0') {
            nlohmann::json j;
            try {
                j = nlohmann::json::parse(config_json);
            } catch (const std::exception& e) {
                throw ConfigError(std::string("bad suite config JSON: ") + e.what());
            }
            for (const auto& [key, value] : j.items()) {
                if (key == "seed")
                    seed = value.get<std::uint64_t>();
                else if (key == "N")
                    N = value.get<int>();
                else if (key == "threads")
                    threads = value.get<int>();
                else
                    throw ConfigError("unknown suite config key '" + key + "'");
            }
        }
        std::vector<ExperimentReport> reports = run_suite_all(seed, N, threads);
        if (out_dir != nullptr && out_dir[0] != '\0') {
            std::filesystem::create_directories(out_dir);
            for (const ExperimentReport& rep : reports) {
                const std::string stem =
                    (std::filesystem::path(out_dir) / rep.experiment_id).string();
                std::ofstream js(stem + ".report.json", std::ios::binary);
                js << report_to_json(rep);
                std::ofstream cs(stem + ".per_member.csv", std::ios::binary);
                cs << report_to_csv(rep);
                if (!js || !cs) throw NumericError("cannot write reports to " + stem);
            }
        }
        bool ok = true;
        for (const ExperimentReport& rep : reports) ok = ok && rep.pass;
        if (summary_csv != nullptr) *summary_csv = dup_string(suite_summary_csv(reports));
        if (all_pass != nullptr) *all_pass = ok ? 1 : 0;
        return FS_OK;
    });
}

}  // extern "C"
