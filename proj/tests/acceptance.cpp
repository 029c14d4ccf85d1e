// Acceptance suite: one pass/fail line per criterion. Returns nonzero when
// any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "core/experiments.hpp"
#include "core/grid.hpp"
#include "core/interpolation.hpp"
#include "core/norms.hpp"
#include "core/potentials.hpp"
#include "core/report_io.hpp"
#include "core/rng.hpp"

using namespace fracsob;

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Check {
    bool ok = true;
    std::string detail;

    void require(bool cond, const std::string& what) {
        if (!cond && ok) {
            ok = false;
            detail = what;
        }
    }
};

GridFunction from_text(const std::string& text, const PeriodicGrid& g) {
    return synthesize(parse_function_spec(text), g);
}

std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2e", v);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// ---- criterion 1: kernel normalization ------------------------------------------

// int_0^infty G_s(r) dr over sigma = log r with analytic bounds on both tails:
//   G_s(r) <= c * B(s) * r^(s-1)                                (all r)
//   G_s(r) <= c * B(s) * 2^((1-s)/2) * r^(s-1) * e^(-r/2)       (all r)
// with B(s) = Gamma((1-s)/2) * pi^-((1-s)/2) and c the kernel constant.
Check criterion_kernel_mass() {
    Check c;
    double worst = 0.0;
    for (double s : {0.25, 0.5, 0.75}) {
        const double sigma_lo = -70.0, big_r = 50.0;
        const double sigma_hi = std::log(big_r);
        auto f = [s](double sigma) {
            const double r = std::exp(sigma);
            return 2.0 * bessel_kernel(r, s, 1) * r;
        };
        std::size_t panels = 256;
        double step = (sigma_hi - sigma_lo) / static_cast<double>(panels);
        double sum = 0.5 * (f(sigma_lo) + f(sigma_hi));
        for (std::size_t i = 1; i < panels; ++i) sum += f(sigma_lo + step * i);
        double integral = sum * step;
        for (int pass = 0; pass < 5; ++pass) {
            double add = 0.0;
            for (std::size_t i = 0; i < panels; ++i) add += f(sigma_lo + step * (i + 0.5));
            panels *= 2;
            step *= 0.5;
            sum += add;
            const double next = sum * step;
            const bool settle = std::abs(next - integral) < 1e-6 * next;
            integral = next;
            if (settle) break;
        }
        const double kc = 1.0 / (std::pow(4.0 * kPi, s / 2.0) * std::tgamma(s / 2.0));
        const double bs = std::tgamma((1.0 - s) / 2.0) * std::pow(kPi, -(1.0 - s) / 2.0);
        const double r0 = std::exp(sigma_lo);
        const double tail_lo = 2.0 * kc * bs * std::pow(r0, s) / s;
        const double tail_hi = 2.0 * kc * bs * std::pow(2.0, (1.0 - s) / 2.0) *
                               std::pow(big_r, s - 1.0) * 2.0 * std::exp(-big_r / 2.0);
        const double dev = std::abs(integral - 1.0) + tail_lo + tail_hi;
        worst = std::max(worst, dev);
        c.require(dev <= 1e-3, "mass deviation " + sci(dev) + " at s = " + std::to_string(s));
    }
    if (c.ok) c.detail = "max deviation " + sci(worst);
    return c;
}

// ---- criterion 2: exact operator identities --------------------------------------

Check criterion_identities() {
    Check c;
    for (const char* tag : {"Lambda0", "semigroup", "lifting", "riesz-semigroup",
                            "gradient-orderings", "FFTC", "imaginary-isometry"}) {
        ExperimentParams p;
        p.N = 64;
        p.ensemble = 20;
        p.seed = 42;
        p.s = 0.5;
        if (std::string(tag) == "lifting") p.t = 0.3;
        if (std::string(tag) == "imaginary-isometry") p.t = 2.0;
        const auto start = std::chrono::steady_clock::now();
        ExperimentReport rep = run_identity_suite(tag, p);
        const double elapsed = seconds_since(start);
        c.require(rep.aggregate.max <= 1e-10,
                  std::string(tag) + " max error " + sci(rep.aggregate.max));
        c.require(elapsed < 5.0, std::string(tag) + " took " + std::to_string(elapsed) + "s");
    }
    if (c.ok) c.detail = "seven identities at 1e-10";
    return c;
}

// ---- criterion 3: K-functional oracle equivalence ---------------------------------

Check criterion_k_solver() {
    Check c;
    const auto start = std::chrono::steady_clock::now();

    PeriodicGrid g16 = PeriodicGrid::make(1, 16);
    NormCouple l1linf = couple_l1_linf(g16);
    std::vector<double> ts = log_t_grid(1e-2, 1e2, 5);  // 21 values
    double worst = 0.0;
    for (int seed = 0; seed < 50; ++seed) {
        GridFunction u = from_text("rand:band=6,seed=" + std::to_string(seed), g16);
        for (double t : ts) {
            const double exact = k_exact_l1_linf(u, t);
            KResult res = k_numeric(l1linf, u.samples(), t, 1e-4);
            const double err = std::abs(res.value - exact) / exact;
            worst = std::max(worst, err);
        }
    }
    c.require(worst <= 1e-3, "L1/Linf solver error " + sci(worst));

    NormCouple euclid = couple_euclidean(16);
    Rng rng(5);
    for (int trial = 0; trial < 10; ++trial) {
        Vec x(16);
        double nx = 0.0;
        for (auto& z : x) {
            z = cplx{rng.next_normal(), rng.next_normal()};
            nx += std::norm(z);
        }
        nx = std::sqrt(nx);
        for (double t : {0.1, 0.9, 1.0, 1.1, 10.0}) {
            KResult res = k_numeric(euclid, x, t, 1e-4);
            const double exact = std::min(1.0, t) * nx;
            c.require(std::abs(res.value - exact) <= 1e-3 * exact,
                      "Euclidean closed form missed at t = " + std::to_string(t));
        }
    }

    PeriodicGrid g64 = PeriodicGrid::make(1, 64);
    NormCouple hs = couple_l2_hs2(g64, 0.5);
    for (int seed = 0; seed < 5; ++seed) {
        GridFunction u = from_text("rand:band=10,seed=" + std::to_string(seed), g64);
        for (double t : log_t_grid(0.05, 5.0, 2)) {
            const double k2 = k2_envelope_p2(u, t, 0.5);
            KResult res = k_numeric(hs, u.spectrum(), t, 1e-3);
            c.require(res.value >= k2 * (1.0 - 2e-3), "sandwich lower bound failed");
            c.require(res.value <= std::sqrt(2.0) * k2 * (1.0 + 2e-3),
                      "sandwich upper bound failed");
        }
    }

    const double elapsed = seconds_since(start);
    c.require(elapsed < 60.0, "runtime " + std::to_string(elapsed) + "s");
    if (c.ok)
        c.detail = "solver vs oracles, worst L1/Linf error " + sci(worst) + ", " +
                   sci(elapsed) + "s";
    return c;
}

// ---- criterion 4: truncation decomposition chain ----------------------------------

Check criterion_decomposition() {
    Check c;
    PeriodicGrid g = PeriodicGrid::make(1, 64);
    const double const_p2 = std::pow(1.0, -0.5) + std::pow(1.0, 0.5);
    c.require(const_p2 == 2.0, "p = 2 constant is not exactly 2");

    std::vector<EnsembleMember> members = make_ensemble(1, 64, 42, 20, false);
    for (const auto& m : members) {
        GridFunction u = m.make(g);
        for (double p : {1.5, 2.0, 3.0}) {
            const double norm_p = quadrature_lp(u, p);
            const double level = std::pow(p - 1.0, 1.0 / p) * norm_p;
            auto [big, small] = level_truncation_split(u, level);
            for (std::size_t i = 0; i < u.samples().size(); ++i)
                c.require(big.samples()[i] + small.samples()[i] == u.samples()[i],
                          "split does not reassemble exactly");
            c.require(quadrature_lp(small, kInf) <= level * (1.0 + 1e-12),
                      "bounded part exceeds the level");
            c.require(quadrature_lp(big, 1.0) <=
                          std::pow(level, 1.0 - p) * std::pow(norm_p, p) * (1.0 + 1e-12),
                      "integrable part exceeds the level bound");
            const double bound =
                (std::pow(p - 1.0, (1.0 - p) / p) + std::pow(p - 1.0, 1.0 / p)) * norm_p;
            c.require(sum_norm_l1_linf(u) <= bound * (1.0 + 1e-12),
                      "sum-norm bound violated at p = " + std::to_string(p));
        }
    }
    if (c.ok) c.detail = "exact chain over 25 members x 3 exponents";
    return c;
}

// ---- criterion 5: Lorentz layer ----------------------------------------------------

Check criterion_lorentz() {
    Check c;
    PeriodicGrid g = PeriodicGrid::make(1, 64);
    std::vector<EnsembleMember> members = make_ensemble(1, 64, 42, 50, false);
    for (const auto& m : members) {
        GridFunction u = m.make(g);
        for (double p : {1.5, 2.0, 3.0}) {
            const double lhs = lorentz_norm(u, p, p);
            const double rhs = quadrature_lp(u, p);
            c.require(std::abs(lhs - rhs) <= 1e-10 * std::max(rhs, 1e-300),
                      "diagonal Lorentz norm mismatch");
        }
        Rearrangement r = decreasing_rearrangement(u);
        for (double p : {1.0, 1.5, 2.0, 3.0, kInf})
            c.require(std::abs(r.lp_norm(p) - quadrature_lp(u, p)) <=
                          1e-12 * std::max(quadrature_lp(u, p), 1e-300),
                      "rearrangement changed an Lp norm");
    }
    const double m = 0.25;
    GridFunction ind = from_text("ind:[0.25,0.5)", g);
    for (double p : {2.0, 4.0})
        for (double q : {1.0, p, 2.0 * p}) {
            const double expected = std::pow(p / q, 1.0 / q) * std::pow(m, 1.0 / p);
            c.require(std::abs(lorentz_norm(ind, p, q) - expected) <= 1e-10,
                      "indicator closed form missed");
        }
    if (c.ok) c.detail = "diagonal equality, closed forms, norm preservation";
    return c;
}

// ---- criterion 6: Hoelder intermediate + log-convexity -----------------------------

Check criterion_convexity() {
    Check c;
    PeriodicGrid g = PeriodicGrid::make(1, 64);
    const std::pair<double, double> pairs[] = {{1.0, 2.0}, {1.0, kInf}, {1.5, 3.0}, {2.0, 4.0}};
    for (int seed = 0; seed < 50; ++seed) {
        GridFunction u = from_text("rand:band=12,seed=" + std::to_string(seed), g);
        for (auto [p0, p1] : pairs)
            for (int k = 1; k <= 9; ++k) {
                const double theta = 0.1 * k;
                const double invp = (1.0 - theta) / p0 + (p1 == kInf ? 0.0 : theta / p1);
                const double lhs = quadrature_lp(u, 1.0 / invp);
                const double rhs = std::pow(quadrature_lp(u, p0), 1.0 - theta) *
                                   std::pow(quadrature_lp(u, p1), theta);
                c.require(lhs <= rhs * (1.0 + 1e-10), "Hoelder intermediate violated");
            }
        const double s0 = 0.2, s1 = 0.9;
        const double n0 = bessel_norm(u, s0, 2.0), n1 = bessel_norm(u, s1, 2.0);
        for (int k = 1; k <= 9; ++k) {
            const double theta = 0.1 * k;
            const double mid = bessel_norm(u, (1.0 - theta) * s0 + theta * s1, 2.0);
            c.require(mid <= std::pow(n0, 1.0 - theta) * std::pow(n1, theta) * (1.0 + 1e-10),
                      "p = 2 log-convexity violated");
        }
    }
    if (c.ok) c.detail = "zero violations over 50 seeds x 9 thetas";
    return c;
}

// ---- criterion 7: embedding suites -------------------------------------------------

Check criterion_embeddings() {
    Check c;
    const auto start = std::chrono::steady_clock::now();

    struct Run {
        const char* tag;
        ExperimentParams p;
    };
    std::vector<Run> runs;
    auto base = [](double s, double p) {
        ExperimentParams prm;
        prm.N = 64;
        prm.seed = 42;
        prm.ensemble = 50;
        prm.s = s;
        prm.p = p;
        return prm;
    };
    runs.push_back({"FSET-subcritical", base(0.25, 2.0)});
    {
        ExperimentParams p = base(0.5, 2.0);
        p.q = 4.0;
        runs.push_back({"FSET-critical", p});
    }
    {
        ExperimentParams p = base(0.5, 4.0);
        p.mu = 0.25;
        runs.push_back({"FSET-supercritical", p});
        p.mu = 0.125;
        runs.push_back({"FSET-supercritical", p});
    }
    runs.push_back({"CriticalI", base(0.5, 2.0)});
    {
        ExperimentParams p = base(0.5, 2.0);
        p.t = 0.25;
        runs.push_back({"frset", p});
    }
    {
        ExperimentParams p = base(0.25, 2.0);
        p.q = 2.0;
        runs.push_back({"Lorentz-optimal", p});
    }
    runs.push_back({"Riesz-Lorentz", base(0.25, 2.0)});
    runs.push_back({"BMOestimate", base(0.5, 2.0)});
    {
        ExperimentParams p = base(0.5, 2.0);
        p.n = 2;
        p.N = 32;
        p.ensemble = 20;
        runs.push_back({"FSET-subcritical", p});
        ExperimentParams q = p;
        q.p = 4.0;
        runs.push_back({"CriticalI", q});
    }

    for (const Run& run : runs) {
        ExperimentReport rep = run_embedding_suite(run.tag, run.p);
        std::ostringstream what;
        what << run.tag << " (n=" << run.p.n << ")";
        for (const auto& m : rep.per_member)
            c.require(std::isfinite(m.ratio) && m.ratio > 0.0,
                      what.str() + ": non-finite member ratio");
        c.require(std::isfinite(estimate_embedding_constant(rep)),
                  what.str() + ": constant estimate not finite");
        c.require(rep.drift_median <= 0.25,
                  what.str() + ": drift " + sci(rep.drift_median));
        c.require(rep.pass, what.str() + ": suite reported failure");
    }

    const double elapsed = seconds_since(start);
    c.require(elapsed < 300.0, "runtime " + std::to_string(elapsed) + "s");
    if (c.ok) c.detail = std::to_string(runs.size()) + " runs, " + sci(elapsed) + "s";
    return c;
}

// ---- criterion 8: scale comparisons ------------------------------------------------

Check criterion_scales() {
    Check c;
    {
        ExperimentParams p;
        p.N = 64;
        p.seed = 42;
        p.ensemble = 50;
        p.s = 0.5;
        p.p = 2.0;
        p.tol_drift = 0.20;
        ExperimentReport rep = run_scale_comparison("Hilbertcase", p);
        c.require(rep.pass, "Hilbertcase band unstable under refinement");
    }
    {
        ExperimentParams p;
        p.N = 64;
        p.seed = 42;
        p.ensemble = 30;
        p.s0 = 0.25;
        p.s = 0.5;
        p.s1 = 0.75;
        p.p = 3.0;
        ExperimentReport rep = run_scale_comparison("contiguity", p);
        c.require(rep.pass, "contiguity median ordering inconsistent");
    }
    for (double pv : {1.5, 3.0}) {
        ExperimentParams p;
        p.N = 64;
        p.seed = 42;
        p.ensemble = 30;
        p.s = 0.5;
        p.p = pv;
        ExperimentReport rep = run_scale_comparison("nesting", p);
        for (const auto& m : rep.per_member)
            c.require(std::isfinite(m.ratio) && m.ratio > 0.0,
                      "nesting ratio not finite at p = " + std::to_string(pv));
        c.require(rep.pass, "nesting drift too large at p = " + std::to_string(pv));
    }
    if (c.ok) c.detail = "Hilbertcase band, contiguity ordering, nesting bands";
    return c;
}

// ---- criterion 9: byte-identical suite-all -----------------------------------------

Check criterion_determinism() {
    Check c;
#ifndef FRACSOB_CLI_PATH
    c.require(false, "CLI path not configured");
    return c;
#else
    namespace fs = std::filesystem;
    const fs::path work = fs::current_path();
    const fs::path dir_a = work / "acceptance_suite_a";
    const fs::path dir_b = work / "acceptance_suite_b";
    fs::remove_all(dir_a);
    fs::remove_all(dir_b);

    auto run_once = [&](const fs::path& dir, const fs::path& summary) {
        std::ostringstream cmd;
        cmd << '"' << FRACSOB_CLI_PATH << '"' << " suite-all --seed 42 --threads 4 --out "
            << dir << " > " << summary << " 2> " << (summary.string() + ".err");
        return std::system(cmd.str().c_str());
    };
    const int rc_a = run_once(dir_a, work / "suite_summary_a.csv");
    const int rc_b = run_once(dir_b, work / "suite_summary_b.csv");
    c.require(rc_a == rc_b, "suite-all exit codes differ");
    c.require(rc_a == 0, "suite-all reported failures (exit " + std::to_string(rc_a) + ")");

    auto slurp = [](const fs::path& path) {
        std::ifstream in(path, std::ios::binary);
        std::ostringstream buf;
        buf << in.rdbuf();
        return buf.str();
    };
    std::size_t compared = 0;
    if (fs::exists(dir_a) && fs::exists(dir_b)) {
        for (const auto& entry : fs::directory_iterator(dir_a)) {
            const fs::path other = dir_b / entry.path().filename();
            c.require(fs::exists(other), "missing file " + other.string());
            if (!fs::exists(other)) continue;
            c.require(slurp(entry.path()) == slurp(other),
                      "files differ: " + entry.path().filename().string());
            ++compared;
        }
        std::size_t count_b = 0;
        for ([[maybe_unused]] const auto& entry : fs::directory_iterator(dir_b)) ++count_b;
        c.require(compared == count_b, "report file counts differ");
    }
    c.require(compared > 0, "no report files produced");
    c.require(slurp(work / "suite_summary_a.csv") == slurp(work / "suite_summary_b.csv"),
              "summaries differ");
    if (c.ok) c.detail = std::to_string(compared) + " files byte-identical";
    return c;
#endif
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* title;
        std::function<Check()> run;
    };
    const std::vector<Criterion> criteria = {
        {1, "kernel normalization", criterion_kernel_mass},
        {2, "exact operator identities", criterion_identities},
        {3, "K-functional oracle equivalence", criterion_k_solver},
        {4, "truncation decomposition chain", criterion_decomposition},
        {5, "Lorentz layer", criterion_lorentz},
        {6, "intermediate and log-convexity inequalities", criterion_convexity},
        {7, "embedding suites with refinement", criterion_embeddings},
        {8, "scale comparisons", criterion_scales},
        {9, "byte-identical suite-all", criterion_determinism},
    };

    bool all_ok = true;
    for (const Criterion& criterion : criteria) {
        Check result;
        try {
            result = criterion.run();
        } catch (const std::exception& e) {
            result.ok = false;
            result.detail = std::string("exception: ") + e.what();
        }
        all_ok = all_ok && result.ok;
        std::printf("criterion %d %-45s [%s] %s\n", criterion.id, criterion.title,
                    result.ok ? "PASS" : "FAIL", result.detail.c_str());
        std::fflush(stdout);
    }
    return all_ok ? 0 : 1;
}
