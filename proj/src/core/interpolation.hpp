#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "core/grid.hpp"
#include "core/norms.hpp"

namespace fracsob {

using Vec = std::vector<cplx>;

// A norm on coordinate vectors in C^d, with optional closed-form machinery:
// prox (w.r.t. the plain Euclidean inner product) enables the splitting
// solver, subgrad enables the first-order fallback.
struct NormEvaluator {
    std::string label;
    std::function<double(std::span<const cplx>)> value;
    std::function<Vec(std::span<const cplx>, double lambda)> prox;
    std::function<Vec(std::span<const cplx>)> subgrad;
    // fused value + subgradient, preferred by the first-order solver when set
    std::function<std::pair<double, Vec>(std::span<const cplx>)> vsub;
};

struct NormCouple {
    std::size_t dimension = 0;
    NormEvaluator norm0, norm1;

    // Spot-checks absolute homogeneity and the triangle inequality on random
    // probes (tolerance 1e-9) before returning the couple.
    static NormCouple checked(std::size_t dimension, NormEvaluator norm0,
                              NormEvaluator norm1, std::uint64_t probe_seed = 0x9d2c5680);
};

// Ready-made couples. The l2/hs2 couple operates on spectral coordinate
// vectors (pass u.spectrum()); the others on sample vectors.
NormCouple couple_l1_linf(const PeriodicGrid& g);
NormCouple couple_euclidean(std::size_t dimension);
NormCouple couple_l2_hs2(const PeriodicGrid& g, double s1);
NormCouple couple_lp_w1p(const PeriodicGrid& g, double p);

struct KSolveOptions {
    int max_iters = 100000;
    int restarts = 3;                 // agreement certification
    const Vec* warm_start = nullptr;  // skip extra restarts when provided
};

struct KResult {
    double value = 0.0;
    double part0 = 0.0;  // norm0(x - v)
    double part1 = 0.0;  // norm1(v)
    Vec split1;          // minimizing v (the norm1 component)
    int iterations = 0;
    double restart_spread = 0.0;
    bool certified = false;
};

// Approximate minimizer of norm0(x - v) + t * norm1(v). Splitting iteration
// when both proxes exist, normalized subgradient descent otherwise. The
// returned value never exceeds min(norm0(x), t * norm1(x)) since both
// endpoint splits are always evaluated.
KResult k_numeric(const NormCouple& couple, std::span<const cplx> x, double t,
                  double tol, const KSolveOptions& opts = {});

// Exact K(t, u; L1, Linf) = int_0^t f*(tau) dtau on the step rearrangement.
double k_exact_l1_linf(const GridFunction& u, double t);
double k_exact_l1_linf(const Rearrangement& r, double t);

// Quadratic-mean envelope for the couple (L2, H^{s1,2}):
//   K2(t, u)^2 = sum_k |c_k|^2 t^2 w_k^2 / (1 + t^2 w_k^2),
//   w_k = (1 + 4 pi^2 |k|^2)^(s1/2).
// Brackets the additive K: K2 <= K <= sqrt(2) K2.
double k2_envelope_p2(const GridFunction& u, double t, double s1_space);

struct KCurve {
    std::vector<double> t_grid;
    std::vector<double> k_values;
    std::vector<double> part0, part1;

    // k nondecreasing, k/t nonincreasing, k <= min(norm0, t*norm1) + slack.
    void validate(double norm0_x, double norm1_x, double slack) const;
};

std::vector<double> log_t_grid(double t_min, double t_max, int per_decade = 32);

// Exact curve on (L1, Linf) with the level-truncation optimal split.
KCurve k_curve_l1_linf(const GridFunction& u, const std::vector<double>& t_grid);
// Numeric curve with warm starts along increasing t.
KCurve k_curve_numeric(const NormCouple& couple, std::span<const cplx> x,
                       const std::vector<double>& t_grid, double tol);

// K(.) together with the endpoint norms of x; candidate_ts are extra points
// checked by the q = inf sup (breakpoints of a piecewise-linear K).
struct KFunctional {
    std::function<double(double)> k;
    double norm0_x = 0.0;
    double norm1_x = 0.0;
    std::vector<double> candidate_ts;
};

KFunctional kfun_exact_l1_linf(const GridFunction& u);
// Stateful numeric evaluator (warm-started); not re-entrant.
KFunctional kfun_numeric(const NormCouple& couple, Vec x, double tol);

// (int_0^inf (t^-theta K(t))^q dt/t)^(1/q) on a log grid (32 points per
// decade) over a range chosen so both analytic tail bounds, from
// K(t) <= min(norm0, t*norm1), stay below tail_tol times the computed value;
// sup form for q = inf.
double real_interp_norm(const KFunctional& kf, double theta, double q,
                        double tail_tol = 1e-3);

// Level-t truncation u = g + h with g = u 1{|u|>t}, h = u 1{|u|<=t}.
std::pair<GridFunction, GridFunction> level_truncation_split(const GridFunction& u,
                                                             double t);

}  // namespace fracsob
