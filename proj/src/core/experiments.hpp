#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "core/grid.hpp"

namespace fracsob {

struct ExperimentParams {
    int n = 1;
    int N = 64;
    double s = 0.5;
    double t = 0.0;
    double p = 2.0;
    double q = 0.0;
    double mu = 0.0;
    double s0 = 0.0;
    double s1 = 0.0;
    std::uint64_t seed = 42;
    int ensemble = 50;  // random members; 5 structured members are appended
    int threads = 1;
    double tol_identity = 1e-10;
    double tol_drift = 0.25;
    bool refine = true;  // N -> 2N stability check
};

struct MemberResult {
    std::uint64_t seed = 0;
    double numerator = 0.0;
    double denominator = 0.0;
    double ratio = 0.0;
    double ratio_refined = 0.0;  // same member on the 2N grid (0 when skipped)
};

struct Aggregate {
    double max = 0.0;
    double min = 0.0;
    double median = 0.0;
};

struct ExperimentReport {
    std::string experiment_id;
    std::string theorem_tag;
    ExperimentParams params;
    std::vector<MemberResult> per_member;
    Aggregate aggregate;
    bool refined = false;
    double drift_median = 0.0;
    double drift_max = 0.0;  // per-member |r(2N) - r(N)| / r(N)
    std::vector<std::pair<std::string, double>> extras;
    bool pass = false;
    std::string note;
};

// One reproducible test function: `make` synthesizes the same underlying
// torus function on any admissible grid (used for the refinement check).
struct EnsembleMember {
    std::uint64_t seed = 0;
    std::string label;
    std::function<GridFunction(const PeriodicGrid&)> make;
};

// `random_count` seeded band-limited members (band = base_N/4, fixed so
// refinement keeps the function) plus five structured members: bump,
// band-truncated indicator, single mode, two-mode beat, constant-plus-spike.
std::vector<EnsembleMember> make_ensemble(int dim, int base_N, std::uint64_t seed,
                                          int random_count, bool zero_mean,
                                          bool structured = true);

// Identity tags:  Lambda0, semigroup, lifting, riesz-semigroup,
//                 gradient-orderings, FFTC, imaginary-isometry
// Embedding tags: Lp-embedding, FSET-subcritical, FSET-critical,
//                 FSET-supercritical, CriticalI, frset, Lorentz-optimal,
//                 Riesz-Lorentz, BMOestimate, Mihlin
// Scale tags:     Hilbertcase, contiguity, nesting, gagliardo-vs-interp
ExperimentReport run_identity_suite(const std::string& tag, const ExperimentParams& params);
ExperimentReport run_embedding_suite(const std::string& tag, const ExperimentParams& params);
ExperimentReport run_scale_comparison(const std::string& tag, const ExperimentParams& params);

// Dispatch on the tag to the suite family above; unknown tag -> ConfigError.
ExperimentReport run_experiment(const std::string& tag, const ExperimentParams& params);

// Empirical max ratio: a certified lower bound on any valid embedding
// constant (never an upper bound). Requires >= 10 members.
double estimate_embedding_constant(const ExperimentReport& report);

// Default battery over every in-scope statement (n=1 at N, plus an n=2
// smoke pair at N/2). All parameters derive from (seed, N, threads).
std::vector<ExperimentReport> run_suite_all(std::uint64_t seed, int N, int threads);

// JSON config with unknown-key rejection. Recognized keys: tag, n, N, s, t,
// p, q, mu, s0, s1, seed, ensemble, threads, tol_identity, tol_drift, refine.
std::pair<std::string, ExperimentParams> parse_experiment_config(const std::string& json_text);

}  // namespace fracsob
