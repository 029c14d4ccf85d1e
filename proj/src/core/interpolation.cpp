#include "core/interpolation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <sstream>

#include "core/potentials.hpp"
#include "core/rng.hpp"

namespace fracsob {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kFourPiSq = 39.478417604357434475337963999505;

double vec_norm2(std::span<const cplx> v) {
    double acc = 0.0;
    for (const auto& z : v) acc += std::norm(z);
    return std::sqrt(acc);
}

Vec vec_sub(std::span<const cplx> a, std::span<const cplx> b) {
    Vec out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
    return out;
}

// Projection onto the unit ball of the modulus-l1 norm {w : sum |w_i| <= 1}.
Vec project_l1_ball(std::span<const cplx> y) {
    std::vector<double> m(y.size());
    double total = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) total += (m[i] = std::abs(y[i]));
    Vec out(y.begin(), y.end());
    if (total <= 1.0) return out;
    std::vector<double> sorted = m;
    std::sort(sorted.begin(), sorted.end(), std::greater<double>());
    double cum = 0.0, tau = 0.0;
    for (std::size_t j = 0; j < sorted.size(); ++j) {
        cum += sorted[j];
        const double cand = (cum - 1.0) / static_cast<double>(j + 1);
        if (sorted[j] - cand > 0.0)
            tau = cand;
        else
            break;
    }
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double keep = std::max(0.0, m[i] - tau);
        out[i] = m[i] > 0.0 ? y[i] * (keep / m[i]) : cplx{0.0, 0.0};
    }
    return out;
}

// ---- evaluator factories ----------------------------------------------------

NormEvaluator make_weighted_l1(double h) {
    NormEvaluator e;
    e.label = "L1";
    e.value = [h](std::span<const cplx> v) {
        double acc = 0.0;
        for (const auto& z : v) acc += std::abs(z);
        return h * acc;
    };
    e.prox = [h](std::span<const cplx> z, double lambda) {
        Vec out(z.size());
        const double th = lambda * h;
        for (std::size_t i = 0; i < z.size(); ++i) {
            const double m = std::abs(z[i]);
            out[i] = m > th ? z[i] * ((m - th) / m) : cplx{0.0, 0.0};
        }
        return out;
    };
    e.subgrad = [h](std::span<const cplx> v) {
        Vec out(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) {
            const double m = std::abs(v[i]);
            out[i] = m > 0.0 ? v[i] * (h / m) : cplx{0.0, 0.0};
        }
        return out;
    };
    return e;
}

NormEvaluator make_max_modulus() {
    NormEvaluator e;
    e.label = "Linf";
    e.value = [](std::span<const cplx> v) {
        double m = 0.0;
        for (const auto& z : v) m = std::max(m, std::abs(z));
        return m;
    };
    // Moreau: prox of lambda*||.||_inf via projection onto the dual ball.
    e.prox = [](std::span<const cplx> z, double lambda) {
        Vec scaled(z.size());
        for (std::size_t i = 0; i < z.size(); ++i) scaled[i] = z[i] / lambda;
        Vec proj = project_l1_ball(scaled);
        Vec out(z.size());
        for (std::size_t i = 0; i < z.size(); ++i) out[i] = z[i] - lambda * proj[i];
        return out;
    };
    return e;
}

NormEvaluator make_euclidean(double scale) {
    NormEvaluator e;
    e.label = "L2";
    e.value = [scale](std::span<const cplx> v) { return scale * vec_norm2(v); };
    e.prox = [scale](std::span<const cplx> z, double lambda) {
        const double n = vec_norm2(z);
        const double factor = n > lambda * scale ? 1.0 - lambda * scale / n : 0.0;
        Vec out(z.size());
        for (std::size_t i = 0; i < z.size(); ++i) out[i] = z[i] * factor;
        return out;
    };
    e.subgrad = [scale](std::span<const cplx> v) {
        const double n = vec_norm2(v);
        Vec out(v.size(), cplx{0.0, 0.0});
        if (n > 0.0)
            for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] * (scale / n);
        return out;
    };
    return e;
}

// ||W v||_2 with strictly positive diagonal weights. The prox reduces to a
// scalar secular equation solved by bisection.
NormEvaluator make_diag_weighted_l2(std::vector<double> w, std::string label) {
    NormEvaluator e;
    e.label = std::move(label);
    auto weights = std::make_shared<std::vector<double>>(std::move(w));
    e.value = [weights](std::span<const cplx> v) {
        double acc = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i)
            acc += (*weights)[i] * (*weights)[i] * std::norm(v[i]);
        return std::sqrt(acc);
    };
    e.prox = [weights](std::span<const cplx> z, double lambda) {
        const auto& w = *weights;
        double dual = 0.0;  // ||W^-1 z||_2 decides whether 0 is the prox
        double mu_hi = 0.0;
        for (std::size_t i = 0; i < z.size(); ++i) {
            const double nz = std::norm(z[i]);
            dual += nz / (w[i] * w[i]);
            mu_hi += w[i] * w[i] * nz;
        }
        dual = std::sqrt(dual);
        mu_hi = std::sqrt(mu_hi);
        Vec out(z.size(), cplx{0.0, 0.0});
        if (dual <= lambda || mu_hi == 0.0) return out;
        // psi(mu) = sum w^2 |z|^2 / (mu + lambda w^2)^2 - 1 is convex and
        // decreasing, so Newton from the right bracket end stays bracketed.
        auto psi_and_slope = [&](double mu) {
            double acc = 0.0, slope = 0.0;
            for (std::size_t i = 0; i < z.size(); ++i) {
                const double d = mu + lambda * w[i] * w[i];
                const double term = w[i] * w[i] * std::norm(z[i]) / (d * d);
                acc += term;
                slope -= 2.0 * term / d;
            }
            return std::make_pair(acc - 1.0, slope);
        };
        double mu = mu_hi;
        for (int it = 0; it < 80; ++it) {
            auto [value, slope] = psi_and_slope(mu);
            if (std::abs(value) < 1e-13) break;
            double next = mu - value / slope;
            if (!(next > 0.0)) next = 0.5 * mu;  // bisect toward zero as a guard
            if (std::abs(next - mu) <= 1e-15 * mu_hi) {
                mu = next;
                break;
            }
            mu = next;
        }
        for (std::size_t i = 0; i < z.size(); ++i)
            out[i] = z[i] * (mu / (mu + lambda * w[i] * w[i]));
        return out;
    };
    e.subgrad = [weights, value = e.value](std::span<const cplx> v) {
        const double n = value(v);
        Vec out(v.size(), cplx{0.0, 0.0});
        if (n > 0.0)
            for (std::size_t i = 0; i < v.size(); ++i)
                out[i] = v[i] * ((*weights)[i] * (*weights)[i] / n);
        return out;
    };
    return e;
}

NormEvaluator make_grid_lp(const PeriodicGrid& g, double p) {
    NormEvaluator e;
    e.label = "Lp";
    const double h = g.cell_volume();
    e.value = [h, p](std::span<const cplx> v) {
        double acc = 0.0;
        for (const auto& z : v) acc += std::pow(std::abs(z), p);
        return std::pow(h * acc, 1.0 / p);
    };
    e.subgrad = [h, p, value = e.value](std::span<const cplx> v) {
        const double n = value(v);
        Vec out(v.size(), cplx{0.0, 0.0});
        if (n == 0.0) return out;
        const double c = h * std::pow(n, 1.0 - p);
        for (std::size_t i = 0; i < v.size(); ++i) {
            const double m = std::abs(v[i]);
            if (m > 0.0) out[i] = v[i] * (c * std::pow(m, p - 2.0));
        }
        return out;
    };
    e.vsub = [value = e.value, subgrad = e.subgrad](std::span<const cplx> v) {
        return std::make_pair(value(v), subgrad(v));
    };
    return e;
}

// Scratch space for the W1p evaluator: one forward transform per call plus
// one inverse per axis (and the adjoint pair in the gradient path), no
// GridFunction round trips.
struct W1pWork {
    PeriodicGrid g;
    double p;
    double h;
    std::vector<std::vector<double>> dmult;  // per axis: 2 pi k_j, Nyquist zeroed
    mutable Vec spec, dspec, back, w;
    mutable std::vector<Vec> grad;
    mutable std::vector<double> mag;

    W1pWork(const PeriodicGrid& grid, double pp) : g(grid), p(pp), h(grid.cell_volume()) {
        const int n = g.points_per_axis;
        const std::size_t count = g.point_count();
        dmult.resize(static_cast<std::size_t>(g.dim));
        for (int axis = 0; axis < g.dim; ++axis) {
            auto& m = dmult[static_cast<std::size_t>(axis)];
            m.resize(count);
            for (std::size_t i = 0; i < count; ++i) {
                const int idx = g.dim == 1 ? static_cast<int>(i)
                                : axis == 0 ? static_cast<int>(i) / n
                                            : static_cast<int>(i) % n;
                const int k = g.freq(idx);
                m[i] = k == -n / 2 ? 0.0 : 2.0 * kPi * k;
            }
        }
        grad.resize(static_cast<std::size_t>(g.dim));
        mag.resize(count);
    }

    // fills grad and mag; returns (lp part, gradient part)
    std::pair<double, double> analyze(std::span<const cplx> v) const {
        detail::dft(g, Vec(v.begin(), v.end()), spec, true);
        std::fill(mag.begin(), mag.end(), 0.0);
        for (int axis = 0; axis < g.dim; ++axis) {
            const auto& m = dmult[static_cast<std::size_t>(axis)];
            dspec.resize(spec.size());
            for (std::size_t i = 0; i < spec.size(); ++i)
                dspec[i] = spec[i] * cplx{0.0, m[i]};
            detail::dft(g, dspec, grad[static_cast<std::size_t>(axis)], false);
            for (std::size_t i = 0; i < mag.size(); ++i)
                mag[i] += std::norm(grad[static_cast<std::size_t>(axis)][i]);
        }
        double lp_acc = 0.0, g_acc = 0.0;
        for (std::size_t i = 0; i < mag.size(); ++i) {
            mag[i] = std::sqrt(mag[i]);
            lp_acc += std::pow(std::abs(v[i]), p);
            g_acc += std::pow(mag[i], p);
        }
        return {std::pow(h * lp_acc, 1.0 / p), std::pow(h * g_acc, 1.0 / p)};
    }
};

NormEvaluator make_grid_w1p(const PeriodicGrid& g, double p) {
    NormEvaluator e;
    e.label = "W1p";
    auto work = std::make_shared<W1pWork>(g, p);
    e.value = [work](std::span<const cplx> v) {
        auto [lp, gp] = work->analyze(v);
        return lp + gp;
    };
    e.vsub = [work](std::span<const cplx> v) {
        auto [lp, gp] = work->analyze(v);
        Vec out(v.size(), cplx{0.0, 0.0});
        if (lp > 0.0) {
            const double c = work->h * std::pow(lp, 1.0 - work->p);
            for (std::size_t i = 0; i < v.size(); ++i) {
                const double m = std::abs(v[i]);
                if (m > 0.0) out[i] = v[i] * (c * std::pow(m, work->p - 2.0));
            }
        }
        if (gp > 0.0) {
            const double c = work->h * std::pow(gp, 1.0 - work->p);
            for (int axis = 0; axis < work->g.dim; ++axis) {
                const auto& gr = work->grad[static_cast<std::size_t>(axis)];
                work->w.assign(v.size(), cplx{0.0, 0.0});
                for (std::size_t i = 0; i < v.size(); ++i)
                    if (work->mag[i] > 0.0)
                        work->w[i] = gr[i] * (c * std::pow(work->mag[i], work->p - 2.0));
                detail::dft(work->g, work->w, work->spec, true);
                const auto& m = work->dmult[static_cast<std::size_t>(axis)];
                for (std::size_t i = 0; i < work->spec.size(); ++i)
                    work->spec[i] *= cplx{0.0, m[i]};
                detail::dft(work->g, work->spec, work->back, false);
                // adjoint of the derivative is its negative
                for (std::size_t i = 0; i < v.size(); ++i) out[i] -= work->back[i];
            }
        }
        return std::make_pair(lp + gp, std::move(out));
    };
    e.subgrad = [vsub = e.vsub](std::span<const cplx> v) { return vsub(v).second; };
    return e;
}

}  // namespace

// ---- couple construction ----------------------------------------------------

NormCouple NormCouple::checked(std::size_t dimension, NormEvaluator norm0,
                               NormEvaluator norm1, std::uint64_t probe_seed) {
    NormCouple c{dimension, std::move(norm0), std::move(norm1)};
    Rng rng(probe_seed);
    for (const NormEvaluator* e : {&c.norm0, &c.norm1}) {
        for (int probe = 0; probe < 4; ++probe) {
            Vec a(dimension), b(dimension);
            for (auto& z : a) z = cplx{rng.next_normal(), rng.next_normal()};
            for (auto& z : b) z = cplx{rng.next_normal(), rng.next_normal()};
            const double na = e->value(a), nb = e->value(b);
            const double scale = std::max({na, nb, 1e-30});
            const double alpha = 0.25 + 2.0 * rng.next_double();
            Vec sa(dimension), sum(dimension);
            for (std::size_t i = 0; i < dimension; ++i) {
                sa[i] = alpha * a[i];
                sum[i] = a[i] + b[i];
            }
            if (std::abs(e->value(sa) - alpha * na) > 1e-9 * scale * alpha)
                throw ConfigError("couple norm '" + e->label + "' fails homogeneity probe");
            if (e->value(sum) > na + nb + 1e-9 * scale)
                throw ConfigError("couple norm '" + e->label +
                                  "' fails triangle-inequality probe");
        }
    }
    return c;
}

NormCouple couple_l1_linf(const PeriodicGrid& g) {
    return NormCouple::checked(g.point_count(), make_weighted_l1(g.cell_volume()),
                               make_max_modulus());
}

NormCouple couple_euclidean(std::size_t dimension) {
    return NormCouple::checked(dimension, make_euclidean(1.0), make_euclidean(1.0));
}

NormCouple couple_l2_hs2(const PeriodicGrid& g, double s1) {
    std::vector<double> w(g.point_count());
    for (std::size_t i = 0; i < w.size(); ++i)
        w[i] = std::pow(1.0 + kFourPiSq * g.freq_norm_sq(i), 0.5 * s1);
    // Spectral coordinates: plain l2 equals the grid L2 norm by Parseval.
    return NormCouple::checked(g.point_count(), make_euclidean(1.0),
                               make_diag_weighted_l2(std::move(w), "Hs2"));
}

NormCouple couple_lp_w1p(const PeriodicGrid& g, double p) {
    if (!(p >= 1.0 && p < kInf)) throw ConfigError("couple_lp_w1p requires p in [1,inf)");
    return NormCouple::checked(g.point_count(), make_grid_lp(g, p), make_grid_w1p(g, p));
}

// ---- K solvers ----------------------------------------------------------------

namespace {

struct Candidate {
    double value;
    Vec v;
};

double objective(const NormCouple& c, std::span<const cplx> x, double t,
                 std::span<const cplx> v) {
    return c.norm0.value(vec_sub(x, v)) + t * c.norm1.value(v);
}

// Douglas-Rachford on f(v) = norm0(x - v), g(v) = t * norm1(v).
Candidate run_splitting(const NormCouple& c, std::span<const cplx> x, double t,
                        double gamma, Vec y, int max_iters) {
    const std::size_t d = x.size();
    Candidate best{objective(c, x, t, y), y};
    int since_improved = 0;
    for (int it = 0; it < max_iters; ++it) {
        // u = prox_{gamma f}(y) = x - prox0(x - y, gamma)
        Vec u = c.norm0.prox(vec_sub(x, y), gamma);
        for (std::size_t i = 0; i < d; ++i) u[i] = x[i] - u[i];
        Vec refl(d);
        for (std::size_t i = 0; i < d; ++i) refl[i] = 2.0 * u[i] - y[i];
        Vec w = c.norm1.prox(refl, gamma * t);
        double shift = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            const cplx delta = w[i] - u[i];
            shift += std::norm(delta);
            y[i] += delta;
        }
        for (const Vec* v : {&u, &w}) {
            const double val = objective(c, x, t, *v);
            if (val < best.value * (1.0 - 1e-12)) {
                best = {val, *v};
                since_improved = 0;
            }
        }
        ++since_improved;
        if (it > 30 && (since_improved > 250 || std::sqrt(shift) < 1e-15 * (1.0 + best.value)))
            break;
    }
    return best;
}

Candidate run_subgradient(const NormCouple& c, std::span<const cplx> x, double t,
                          Vec v, double step0, int max_iters, int per_stage) {
    const std::size_t d = x.size();
    auto eval0 = [&](std::span<const cplx> z) {
        if (c.norm0.vsub) return c.norm0.vsub(z);
        return std::make_pair(c.norm0.value(z), c.norm0.subgrad(z));
    };
    auto eval1 = [&](std::span<const cplx> z) {
        if (c.norm1.vsub) return c.norm1.vsub(z);
        return std::make_pair(c.norm1.value(z), c.norm1.subgrad(z));
    };
    Candidate best{objective(c, x, t, v), v};
    double alpha = step0;
    int it = 0;
    while (alpha > step0 * 3e-5 && it < max_iters) {
        for (int inner = 0; inner < per_stage && it < max_iters; ++inner, ++it) {
            auto [f0, g0] = eval0(vec_sub(x, v));
            auto [f1, g1] = eval1(v);
            const double val = f0 + t * f1;
            if (val < best.value) best = {val, v};
            double gn = 0.0;
            for (std::size_t i = 0; i < d; ++i) {
                g1[i] = t * g1[i] - g0[i];
                gn += std::norm(g1[i]);
            }
            gn = std::sqrt(gn);
            if (gn < 1e-300) return best;
            const double sc = alpha / gn;
            for (std::size_t i = 0; i < d; ++i) v[i] -= sc * g1[i];
        }
        alpha *= 0.5;
    }
    return best;
}

}  // namespace

KResult k_numeric(const NormCouple& couple, std::span<const cplx> x, double t,
                  double tol, const KSolveOptions& opts) {
    if (!(t > 0.0)) throw ConfigError("k_numeric requires t > 0");
    if (!(tol > 0.0 && tol < 0.1)) throw ConfigError("k_numeric tolerance must lie in (0, 0.1)");
    if (x.size() != couple.dimension) throw ConfigError("k_numeric: dimension mismatch");

    const bool splitting = static_cast<bool>(couple.norm0.prox) &&
                           static_cast<bool>(couple.norm1.prox);
    if (!splitting && (!couple.norm0.subgrad || !couple.norm1.subgrad))
        throw ConfigError("couple provides neither proxes nor subgradients");

    // Endpoint splits: v = 0 gives norm0(x), v = x gives t*norm1(x). These
    // guarantee value <= min(norm0(x), t*norm1(x)).
    const double n0 = couple.norm0.value(x);
    const double n1 = couple.norm1.value(x);
    Candidate best = n0 <= t * n1 ? Candidate{n0, Vec(x.size(), cplx{0.0, 0.0})}
                                  : Candidate{t * n1, Vec(x.begin(), x.end())};

    const double scale = std::max(vec_norm2(x), 1e-300);
    std::vector<double> run_values;
    int iters_per_run = std::max(50, opts.max_iters / std::max(1, opts.restarts));
    Rng rng(0x5eedULL ^ x.size());

    auto consider = [&](const Candidate& cand) {
        run_values.push_back(cand.value);
        if (cand.value < best.value) best = cand;
    };

    if (opts.warm_start != nullptr) {
        if (splitting) {
            consider(run_splitting(couple, x, t, 0.5 * scale, *opts.warm_start,
                                   iters_per_run));
        } else {
            consider(run_subgradient(couple, x, t, *opts.warm_start, 0.05 * scale,
                                     iters_per_run, 40));
        }
    } else {
        for (int r = 0; r < std::max(1, opts.restarts); ++r) {
            Vec init(x.size());
            if (r == 0) {
                init.assign(x.begin(), x.end());
                for (auto& z : init) z *= 0.5;
            } else if (r == 1) {
                init.assign(x.begin(), x.end());
            } else {
                for (std::size_t i = 0; i < init.size(); ++i)
                    init[i] = x[i] * (0.5 + 0.5 * rng.next_double());
            }
            if (splitting) {
                const double gamma = scale * (r == 0 ? 1.0 : r == 1 ? 0.5 : 2.0);
                consider(run_splitting(couple, x, t, gamma, std::move(init),
                                       iters_per_run));
            } else {
                const double step = scale * (r == 0 ? 0.25 : r == 1 ? 0.05 : 0.5);
                consider(run_subgradient(couple, x, t, std::move(init), step, iters_per_run,
                                         100));
            }
        }
    }

    KResult res;
    res.value = best.value;
    res.split1 = std::move(best.v);
    res.part0 = couple.norm0.value(vec_sub(x, res.split1));
    res.part1 = couple.norm1.value(res.split1);
    res.iterations = iters_per_run;
    if (run_values.size() > 1) {
        const double lo = *std::min_element(run_values.begin(), run_values.end());
        const double hi = *std::max_element(run_values.begin(), run_values.end());
        res.restart_spread = (hi - lo) / std::max(lo, 1e-300);
        res.certified = res.restart_spread <= std::max(tol, 1e-12);
        if (res.restart_spread > 10.0 * tol) {
            std::ostringstream msg;
            msg << "K solver restarts disagree within the iteration cap: best value "
                << res.value << ", restart spread " << res.restart_spread << " at t = " << t;
            throw NumericError(msg.str());
        }
    } else {
        res.restart_spread = 0.0;
        res.certified = false;
    }
    return res;
}

// ---- exact / closed-form K ---------------------------------------------------

double k_exact_l1_linf(const Rearrangement& r, double t) {
    if (!(t > 0.0)) throw ConfigError("k_exact_l1_linf requires t > 0");
    return r.integral_to(t);
}

double k_exact_l1_linf(const GridFunction& u, double t) {
    return k_exact_l1_linf(decreasing_rearrangement(u), t);
}

double k2_envelope_p2(const GridFunction& u, double t, double s1_space) {
    double acc = 0.0;
    const PeriodicGrid& g = u.grid();
    for (std::size_t i = 0; i < u.spectrum().size(); ++i) {
        const double c2 = std::norm(u.spectrum()[i]);
        if (c2 == 0.0) continue;
        const double w2 = std::pow(1.0 + kFourPiSq * g.freq_norm_sq(i), s1_space);
        const double tw2 = t * t * w2;
        acc += c2 * tw2 / (1.0 + tw2);
    }
    return std::sqrt(acc);
}

// ---- curves --------------------------------------------------------------------

std::vector<double> log_t_grid(double t_min, double t_max, int per_decade) {
    if (!(t_min > 0.0 && t_max > t_min)) throw ConfigError("bad t range");
    const int count =
        std::max(2, static_cast<int>(std::ceil(std::log10(t_max / t_min) * per_decade)) + 1);
    std::vector<double> out(count);
    const double step = std::log(t_max / t_min) / (count - 1);
    for (int i = 0; i < count; ++i) out[i] = t_min * std::exp(step * i);
    out.back() = t_max;
    return out;
}

void KCurve::validate(double norm0_x, double norm1_x, double slack) const {
    const double scale = std::max({norm0_x, 1e-300});
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        if (k_values[i] < -slack * scale)
            throw NumericError("K curve negative at t index " + std::to_string(i));
        const double bound = std::min(norm0_x, t_grid[i] * norm1_x);
        if (k_values[i] > bound + slack * std::max(bound, 1e-300) + 1e-14 * scale)
            throw NumericError("K exceeds min(norm0, t norm1) at t index " +
                               std::to_string(i));
        if (i == 0) continue;
        const double tol_i = slack * std::max(k_values[i], k_values[i - 1]) + 1e-14 * scale;
        if (k_values[i] < k_values[i - 1] - tol_i)
            throw NumericError("K not nondecreasing at t index " + std::to_string(i));
        const double r_prev = k_values[i - 1] / t_grid[i - 1];
        const double r_cur = k_values[i] / t_grid[i];
        if (r_cur > r_prev + slack * std::max(r_prev, 1e-300) + 1e-14 * scale)
            throw NumericError("K/t not nonincreasing at t index " + std::to_string(i));
    }
}

KCurve k_curve_l1_linf(const GridFunction& u, const std::vector<double>& t_grid) {
    Rearrangement r = decreasing_rearrangement(u);
    KCurve curve;
    curve.t_grid = t_grid;
    for (double t : t_grid) {
        curve.k_values.push_back(r.integral_to(t));
        // optimal split by level truncation at c = f*(t)
        const std::size_t j = std::min(
            r.values.empty() ? std::size_t{0}
                             : static_cast<std::size_t>(std::floor(t / r.piece)),
            r.values.empty() ? std::size_t{0} : r.values.size() - 1);
        const double level = t >= r.total_measure() ? 0.0 : r.values[j];
        double g1 = 0.0;
        for (double v : r.values) g1 += std::max(0.0, v - level) * r.piece;
        curve.part0.push_back(g1);
        curve.part1.push_back(level);
    }
    return curve;
}

KCurve k_curve_numeric(const NormCouple& couple, std::span<const cplx> x,
                       const std::vector<double>& t_grid, double tol) {
    KCurve curve;
    curve.t_grid = t_grid;
    Vec warm(x.begin(), x.end());
    for (auto& z : warm) z *= 0.5;
    KSolveOptions opts;
    opts.restarts = 1;
    opts.max_iters = 4000;
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        KSolveOptions o = opts;
        o.warm_start = &warm;
        if (i % 8 == 0) {  // periodically re-certify from scratch
            o.warm_start = nullptr;
            o.restarts = 3;
            o.max_iters = 12000;
        }
        KResult res = k_numeric(couple, x, t_grid[i], tol, o);
        warm = res.split1;
        curve.k_values.push_back(res.value);
        curve.part0.push_back(res.part0);
        curve.part1.push_back(res.part1);
    }
    return curve;
}

// ---- real interpolation norm ----------------------------------------------------

KFunctional kfun_exact_l1_linf(const GridFunction& u) {
    auto r = std::make_shared<Rearrangement>(decreasing_rearrangement(u));
    KFunctional kf;
    kf.k = [r](double t) { return r->integral_to(t); };
    kf.norm0_x = r->lp_norm(1.0);
    kf.norm1_x = r->lp_norm(kInf);
    for (std::size_t i = 1; i <= r->values.size(); ++i)
        kf.candidate_ts.push_back(r->piece * static_cast<double>(i));
    return kf;
}

KFunctional kfun_numeric(const NormCouple& couple, Vec x, double tol) {
    auto state = std::make_shared<std::pair<Vec, Vec>>(x, x);  // (x, warm split)
    for (auto& z : state->second) z *= 0.5;
    auto cpl = std::make_shared<NormCouple>(couple);
    KFunctional kf;
    kf.norm0_x = couple.norm0.value(x);
    kf.norm1_x = couple.norm1.value(x);
    kf.k = [state, cpl, tol](double t) {
        KSolveOptions o;
        o.restarts = 1;
        o.max_iters = 1500;
        o.warm_start = &state->second;
        KResult res = k_numeric(*cpl, state->first, t, tol, o);
        state->second = res.split1;
        return res.value;
    };
    return kf;
}

double real_interp_norm(const KFunctional& kf, double theta, double q, double tail_tol) {
    if (!(theta > 0.0 && theta < 1.0)) throw ConfigError("theta must lie in (0,1)");
    if (!(q >= 1.0)) throw ConfigError("q must satisfy q >= 1");
    const double n0 = kf.norm0_x, n1 = kf.norm1_x;
    if (n0 == 0.0 || n1 == 0.0) return 0.0;

    // Nodes live on the fixed lattice t = 10^(k / per_decade), so widening
    // the range reuses every previously computed K value.
    constexpr int kPerDecade = 32;
    const double t_cross = n0 / n1;
    long k_lo = std::lround(std::floor(kPerDecade * (std::log10(t_cross) - 2.0)));
    long k_hi = std::lround(std::ceil(kPerDecade * (std::log10(t_cross) + 2.0)));
    std::map<long, double> memo;
    auto node = [&](long k) { return std::pow(10.0, static_cast<double>(k) / kPerDecade); };
    auto K_at = [&](long k) {
        auto it = memo.find(k);
        if (it != memo.end()) return it->second;
        // evaluate in ascending order so warm-started solvers stay warm
        const double v = kf.k(node(k));
        memo.emplace(k, v);
        return v;
    };

    for (int expand = 0; expand < 14; ++expand) {
        const double lo = node(k_lo), hi = node(k_hi);
        if (q == kInf) {
            double sup = 0.0;
            for (long k = k_lo; k <= k_hi; ++k)
                sup = std::max(sup, std::pow(node(k), -theta) * K_at(k));
            for (double t : kf.candidate_ts)
                if (t > 0.0) sup = std::max(sup, std::pow(t, -theta) * kf.k(t));
            const double tail_lo = std::pow(lo, 1.0 - theta) * n1;
            const double tail_hi = std::pow(hi, -theta) * n0;
            if (tail_lo <= sup * (1.0 + tail_tol) && tail_hi <= sup * (1.0 + tail_tol))
                return sup;
        } else {
            const double dtau = std::log(10.0) / kPerDecade;
            double integral = 0.0;
            double prev = std::pow(std::pow(lo, -theta) * K_at(k_lo), q);
            for (long k = k_lo + 1; k <= k_hi; ++k) {
                const double cur = std::pow(std::pow(node(k), -theta) * K_at(k), q);
                integral += 0.5 * (prev + cur) * dtau;
                prev = cur;
            }
            const double tail_lo =
                std::pow(n1, q) * std::pow(lo, (1.0 - theta) * q) / ((1.0 - theta) * q);
            const double tail_hi = std::pow(n0, q) * std::pow(hi, -theta * q) / (theta * q);
            if (tail_lo + tail_hi <= tail_tol * integral && integral > 0.0)
                return std::pow(integral, 1.0 / q);
        }
        k_lo -= kPerDecade;
        k_hi += kPerDecade;
    }
    std::ostringstream msg;
    msg << "real_interp_norm: tail bound unattainable; try t range [" << node(k_lo) << ", "
        << node(k_hi) << "]";
    throw NumericError(msg.str());
}

std::pair<GridFunction, GridFunction> level_truncation_split(const GridFunction& u,
                                                             double t) {
    if (!(t > 0.0)) throw ConfigError("truncation level must be positive");
    Vec g(u.samples().size()), h(u.samples().size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        const bool above = std::abs(u.samples()[i]) > t;
        g[i] = above ? u.samples()[i] : cplx{0.0, 0.0};
        h[i] = above ? cplx{0.0, 0.0} : u.samples()[i];
    }
    return {GridFunction::from_samples(u.grid(), std::move(g)),
            GridFunction::from_samples(u.grid(), std::move(h))};
}

}  // namespace fracsob
