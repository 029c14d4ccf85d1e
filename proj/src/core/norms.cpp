#include "core/norms.hpp"

#include <algorithm>
#include <cmath>

#include "core/potentials.hpp"

namespace fracsob {

namespace {

double lp_of_magnitudes(const std::vector<double>& mags, double h, double p) {
    if (p == kInf) {
        double m = 0.0;
        for (double v : mags) m = std::max(m, v);
        return m;
    }
    double acc = 0.0;
    if (p == 2.0) {
        for (double v : mags) acc += v * v;
    } else if (p == 1.0) {
        for (double v : mags) acc += v;
    } else {
        for (double v : mags) acc += std::pow(v, p);
    }
    return std::pow(h * acc, 1.0 / p);
}

}  // namespace

// ---- rearrangement -----------------------------------------------------------

double Rearrangement::integral_to(double t) const {
    if (t <= 0.0) return 0.0;
    double acc = 0.0;
    double covered = 0.0;
    for (double v : values) {
        if (covered + piece <= t) {
            acc += v * piece;
            covered += piece;
        } else {
            acc += v * std::max(0.0, t - covered);
            return acc;
        }
    }
    return acc;  // t beyond the total measure: saturate at ||u||_1
}

double Rearrangement::lp_norm(double p) const {
    if (p == kInf) return values.empty() ? 0.0 : values.front();
    double acc = 0.0;
    for (double v : values) acc += std::pow(v, p);
    return std::pow(piece * acc, 1.0 / p);
}

Rearrangement decreasing_rearrangement(const GridFunction& u) {
    Rearrangement r;
    r.piece = u.grid().cell_volume();
    r.values.reserve(u.samples().size());
    for (const auto& v : u.samples()) r.values.push_back(std::abs(v));
    std::sort(r.values.begin(), r.values.end(), std::greater<double>());
    return r;
}

// ---- Bessel / Sobolev scales ---------------------------------------------------

double bessel_norm(const GridFunction& u, double s, double p) {
    if (!(p > 1.0 && p < kInf))
        throw ConfigError("bessel norm requires p in (1, inf)");
    return quadrature_lp(bessel_potential(u, {-s, 0.0}), p);
}

double sobolev_w1p_norm(const GridFunction& u, double p) {
    if (!(p >= 1.0)) throw ConfigError("W1p norm requires p >= 1");
    std::vector<GridFunction> grad = spectral_gradient(u);
    std::vector<double> mag(u.samples().size(), 0.0);
    for (const auto& comp : grad)
        for (std::size_t i = 0; i < mag.size(); ++i) mag[i] += std::norm(comp.samples()[i]);
    for (auto& v : mag) v = std::sqrt(v);
    return quadrature_lp(u, p) + lp_of_magnitudes(mag, u.grid().cell_volume(), p);
}

double gagliardo_seminorm(const GridFunction& u, double s, double p) {
    if (!(s > 0.0 && s < 1.0)) throw ConfigError("Gagliardo seminorm requires s in (0,1)");
    if (!(p >= 1.0 && p < kInf)) throw ConfigError("Gagliardo seminorm requires p in [1,inf)");
    const PeriodicGrid& g = u.grid();
    const int n = g.points_per_axis;
    const auto& f = u.samples();
    const double expo = g.dim + s * p;
    double acc = 0.0;
    if (g.dim == 1) {
        for (int o = 1; o < n; ++o) {
            const double d = static_cast<double>(std::min(o, n - o)) / n;
            double inner = 0.0;
            if (p == 2.0) {
                for (int x = 0; x < n; ++x) inner += std::norm(f[x] - f[(x + o) % n]);
            } else {
                for (int x = 0; x < n; ++x) inner += std::pow(std::abs(f[x] - f[(x + o) % n]), p);
            }
            acc += inner * std::pow(d, -expo);
        }
    } else {
        for (int o0 = 0; o0 < n; ++o0)
            for (int o1 = 0; o1 < n; ++o1) {
                if (o0 == 0 && o1 == 0) continue;
                const double d0 = static_cast<double>(std::min(o0, n - o0)) / n;
                const double d1 = static_cast<double>(std::min(o1, n - o1)) / n;
                const double w = std::pow(std::sqrt(d0 * d0 + d1 * d1), -expo);
                double inner = 0.0;
                for (int x0 = 0; x0 < n; ++x0) {
                    const int y0 = (x0 + o0) % n;
                    const cplx* row = f.data() + static_cast<std::size_t>(x0) * n;
                    const cplx* row2 = f.data() + static_cast<std::size_t>(y0) * n;
                    if (p == 2.0) {
                        for (int x1 = 0; x1 < n; ++x1)
                            inner += std::norm(row[x1] - row2[(x1 + o1) % n]);
                    } else {
                        for (int x1 = 0; x1 < n; ++x1)
                            inner += std::pow(std::abs(row[x1] - row2[(x1 + o1) % n]), p);
                    }
                }
                acc += inner * w;
            }
    }
    const double h = g.cell_volume();
    return std::pow(acc * h * h, 1.0 / p);
}

double gagliardo_wsp_norm(const GridFunction& u, double s, double p) {
    return quadrature_lp(u, p) + gagliardo_seminorm(u, s, p);
}

double holder_seminorm(const GridFunction& u, double mu) {
    if (!(mu > 0.0 && mu <= 1.0)) throw ConfigError("Hoelder exponent must lie in (0,1]");
    const PeriodicGrid& g = u.grid();
    const int n = g.points_per_axis;
    const auto& f = u.samples();
    double best = 0.0;
    if (g.dim == 1) {
        for (int o = 1; o < n; ++o) {
            const double d = static_cast<double>(std::min(o, n - o)) / n;
            double m = 0.0;
            for (int x = 0; x < n; ++x) m = std::max(m, std::abs(f[x] - f[(x + o) % n]));
            best = std::max(best, m * std::pow(d, -mu));
        }
    } else {
        const int stride = std::max(1, n / 32);
        for (int o0 = 0; o0 < n; ++o0)
            for (int o1 = 0; o1 < n; ++o1) {
                if (o0 == 0 && o1 == 0) continue;
                const int w0 = std::min(o0, n - o0), w1 = std::min(o1, n - o1);
                const bool core = w0 <= 8 && w1 <= 8;
                if (!core && (o0 % stride != 0 || o1 % stride != 0)) continue;
                const double d0 = static_cast<double>(w0) / n;
                const double d1 = static_cast<double>(w1) / n;
                double m = 0.0;
                for (int x0 = 0; x0 < n; ++x0) {
                    const cplx* row = f.data() + static_cast<std::size_t>(x0) * n;
                    const cplx* row2 = f.data() + static_cast<std::size_t>((x0 + o0) % n) * n;
                    for (int x1 = 0; x1 < n; ++x1)
                        m = std::max(m, std::abs(row[x1] - row2[(x1 + o1) % n]));
                }
                best = std::max(best, m * std::pow(std::sqrt(d0 * d0 + d1 * d1), -mu));
            }
    }
    return best;
}

namespace {

// Shared dyadic-cube engine: sup over cubes of weight(side) * localized
// oscillation in L^p.
template <class WeightFn>
double dyadic_cube_sup(const GridFunction& u, double p, WeightFn weight) {
    const PeriodicGrid& g = u.grid();
    const int n = g.points_per_axis;
    const double h = g.cell_volume();
    const auto& f = u.samples();
    double best = 0.0;
    std::vector<std::size_t> idx;
    for (int m = n; m >= 1; m /= 2) {
        const double side = static_cast<double>(m) / n;
        const double w = weight(side);
        const int a1_end = g.dim == 1 ? 1 : n;
        for (int a0 = 0; a0 < n; a0 += m) {
            for (int a1 = 0; a1 < a1_end; a1 += m) {
                idx.clear();
                if (g.dim == 1) {
                    for (int i = 0; i < m; ++i) idx.push_back(static_cast<std::size_t>(a0 + i));
                } else {
                    for (int i0 = 0; i0 < m; ++i0)
                        for (int i1 = 0; i1 < m; ++i1)
                            idx.push_back(static_cast<std::size_t>(a0 + i0) * n + (a1 + i1));
                }
                cplx mean = 0.0;
                for (std::size_t i : idx) mean += f[i];
                mean /= static_cast<double>(idx.size());
                double acc = 0.0;
                if (p == 1.0) {
                    for (std::size_t i : idx) acc += std::abs(f[i] - mean);
                } else if (p == 2.0) {
                    for (std::size_t i : idx) acc += std::norm(f[i] - mean);
                } else {
                    for (std::size_t i : idx) acc += std::pow(std::abs(f[i] - mean), p);
                }
                best = std::max(best, w * std::pow(h * acc, 1.0 / p));
            }
        }
    }
    return best;
}

}  // namespace

double bmo_norm(const GridFunction& u) {
    const double n = static_cast<double>(u.grid().dim);
    return dyadic_cube_sup(u, 1.0, [n](double side) { return std::pow(side, -n); });
}

double campanato_seminorm(const GridFunction& u, double p, double lambda) {
    if (!(p >= 1.0 && p < kInf)) throw ConfigError("Campanato seminorm requires p in [1,inf)");
    const double n = static_cast<double>(u.grid().dim);
    if (!(lambda >= 0.0 && lambda <= n + p))
        throw ConfigError("Campanato parameter must satisfy 0 <= lambda <= n + p");
    return dyadic_cube_sup(u, p,
                           [lp = lambda / p](double side) { return std::pow(side, -lp); });
}

// ---- Lorentz scale -------------------------------------------------------------

double lorentz_norm(const Rearrangement& r, double p, double q) {
    if (!(p >= 1.0 && p < kInf)) throw ConfigError("Lorentz norm requires p in [1,inf)");
    if (!(q >= 1.0)) throw ConfigError("Lorentz norm requires q >= 1");
    if (q == kInf) {
        double best = 0.0;
        for (std::size_t i = 0; i < r.values.size(); ++i) {
            const double t_hi = r.piece * static_cast<double>(i + 1);
            best = std::max(best, r.values[i] * std::pow(t_hi, 1.0 / p));
        }
        return best;
    }
    // sum over pieces of a^q * (p/q) * (t_hi^(q/p) - t_lo^(q/p))
    const double qp = q / p;
    double acc = 0.0;
    double t_lo_pow = 0.0;
    for (std::size_t i = 0; i < r.values.size(); ++i) {
        const double t_hi = r.piece * static_cast<double>(i + 1);
        const double t_hi_pow = std::pow(t_hi, qp);
        if (r.values[i] > 0.0) acc += std::pow(r.values[i], q) * (t_hi_pow - t_lo_pow);
        t_lo_pow = t_hi_pow;
    }
    return std::pow(acc * p / q, 1.0 / q);
}

double lorentz_norm(const GridFunction& u, double p, double q) {
    return lorentz_norm(decreasing_rearrangement(u), p, q);
}

double sum_norm_l1_linf(const GridFunction& u) {
    return decreasing_rearrangement(u).integral_to(1.0);
}

double sequence_norm_lsq(std::span<const double> x_abs, double s, double q) {
    if (!(q >= 1.0)) throw ConfigError("sequence norm requires q >= 1");
    if (q == kInf) {
        double best = 0.0;
        for (std::size_t m = 0; m < x_abs.size(); ++m)
            best = std::max(best, std::exp2(static_cast<double>(m) * s) * x_abs[m]);
        return best;
    }
    double acc = 0.0;
    for (std::size_t m = 0; m < x_abs.size(); ++m)
        acc += std::pow(std::exp2(static_cast<double>(m) * s) * x_abs[m], q);
    return std::pow(acc, 1.0 / q);
}

double sequence_norm_lsq(std::span<const cplx> x, double s, double q) {
    std::vector<double> mags(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) mags[i] = std::abs(x[i]);
    return sequence_norm_lsq(std::span<const double>(mags), s, q);
}

// ---- embedding exponents --------------------------------------------------------

Conjugates conjugates(int n, double s, double p) {
    if (n != 1 && n != 2) throw ConfigError("conjugates: n must be 1 or 2");
    if (!(s > 0.0 && s < 1.0)) throw ConfigError("conjugates: s must lie in (0,1)");
    if (!(p > 1.0 && p < kInf)) throw ConfigError("conjugates: p must lie in (1,inf)");
    const double sp = s * p;
    const double dn = static_cast<double>(n);
    Conjugates c{};
    if (std::abs(sp - dn) <= 1e-12 * dn) {
        c.regime = Regime::Critical;
    } else if (sp < dn) {
        c.regime = Regime::Subcritical;
        c.p_star = dn * p / (dn - sp);
    } else {
        c.regime = Regime::Supercritical;
        c.mu_star = s - dn / p;
    }
    return c;
}

// ---- SpaceSpec -----------------------------------------------------------------

namespace {

double parse_exponent(const std::string& v, const std::string& ctx) {
    if (v == "inf") return kInf;
    try {
        std::size_t pos = 0;
        double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("bad number '" + v + "' in space '" + ctx + "'");
    }
}

}  // namespace

SpaceSpec SpaceSpec::parse(const std::string& text) {
    SpaceSpec spec;
    spec.text = text;
    auto colon = text.find(':');
    const std::string kind = text.substr(0, colon);
    std::vector<std::pair<std::string, std::string>> kv;
    if (colon != std::string::npos) {
        std::string body = text.substr(colon + 1);
        std::size_t start = 0;
        while (start <= body.size()) {
            auto end = body.find(',', start);
            std::string part = body.substr(start, end - start);
            auto eq = part.find('=');
            if (eq == std::string::npos)
                throw ConfigError("expected key=value in space '" + text + "'");
            kv.emplace_back(part.substr(0, eq), part.substr(eq + 1));
            if (end == std::string::npos) break;
            start = end + 1;
        }
    }
    auto take = [&](const char* key) -> std::optional<double> {
        for (auto& [k, v] : kv)
            if (k == key) {
                double x = parse_exponent(v, text);
                k.clear();
                return x;
            }
        return std::nullopt;
    };
    auto require = [&](const char* key) {
        auto v = take(key);
        if (!v) throw ConfigError("space '" + text + "' needs " + key + "=");
        return *v;
    };

    if (kind == "Lp") {
        spec.family = SpaceFamily::Lp;
        spec.p = require("p");
        if (!(spec.p >= 1.0)) throw ConfigError("Lp requires p >= 1");
    } else if (kind == "W1p") {
        spec.family = SpaceFamily::W1p;
        spec.p = require("p");
        if (!(spec.p >= 1.0)) throw ConfigError("W1p requires p >= 1");
    } else if (kind == "Hsp") {
        spec.family = SpaceFamily::Hsp;
        spec.s = require("s");
        spec.p = require("p");
        if (!(spec.p > 1.0 && spec.p < kInf)) throw ConfigError("Hsp requires p in (1,inf)");
    } else if (kind == "Wsp") {
        spec.family = SpaceFamily::GagliardoWsp;
        spec.s = require("s");
        spec.p = require("p");
        if (!(spec.s > 0.0 && spec.s < 1.0)) throw ConfigError("Wsp requires s in (0,1)");
        if (!(spec.p >= 1.0 && spec.p < kInf)) throw ConfigError("Wsp requires p in [1,inf)");
    } else if (kind == "Holder") {
        spec.family = SpaceFamily::Holder;
        spec.mu = require("mu");
        if (!(spec.mu > 0.0 && spec.mu <= 1.0)) throw ConfigError("Holder requires mu in (0,1]");
    } else if (kind == "BMO") {
        spec.family = SpaceFamily::BMO;
    } else if (kind == "Camp") {
        spec.family = SpaceFamily::Campanato;
        spec.p = require("p");
        spec.lambda = require("lam");
        if (!(spec.p >= 1.0 && spec.p < kInf)) throw ConfigError("Camp requires p in [1,inf)");
    } else if (kind == "Lorentz") {
        spec.family = SpaceFamily::Lorentz;
        spec.p = require("p");
        spec.q = require("q");
    } else if (kind == "Sum") {
        spec.family = SpaceFamily::SumL1Linf;
    } else if (kind == "Max") {
        spec.family = SpaceFamily::MaxLp0Lp1;
        spec.p0 = require("p0");
        spec.p1 = require("p1");
    } else {
        throw ConfigError("unknown space family '" + kind + "'");
    }
    for (const auto& [k, v] : kv)
        if (!k.empty()) throw ConfigError("unknown key '" + k + "' in space '" + text + "'");
    return spec;
}

double space_norm(const GridFunction& u, const SpaceSpec& spec) {
    switch (spec.family) {
        case SpaceFamily::Lp:
            return quadrature_lp(u, spec.p);
        case SpaceFamily::W1p:
            return sobolev_w1p_norm(u, spec.p);
        case SpaceFamily::Hsp:
            return bessel_norm(u, spec.s, spec.p);
        case SpaceFamily::GagliardoWsp:
            return gagliardo_wsp_norm(u, spec.s, spec.p);
        case SpaceFamily::Holder:
            return holder_seminorm(u, spec.mu);
        case SpaceFamily::BMO:
            return bmo_norm(u);
        case SpaceFamily::Campanato:
            return campanato_seminorm(u, spec.p, spec.lambda);
        case SpaceFamily::Lorentz:
            return lorentz_norm(u, spec.p, spec.q);
        case SpaceFamily::SumL1Linf:
            return sum_norm_l1_linf(u);
        case SpaceFamily::MaxLp0Lp1:
            return std::max(quadrature_lp(u, spec.p0), quadrature_lp(u, spec.p1));
    }
    throw ConfigError("unhandled space family");
}

}  // namespace fracsob
