#include "core/potentials.hpp"

#include <cmath>
#include <functional>
#include <sstream>

namespace fracsob {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kFourPiSq = 39.478417604357434475337963999505;

void check_order(double s) {
    if (!std::isfinite(s) || std::abs(s) > 8.0)
        throw ConfigError("multiplier order out of guarded range |s| <= 8");
}

// Per-mode symbol application. fn receives (flat index, |k|^2) and returns
// the multiplier.
GridFunction apply_symbol(const GridFunction& u,
                          const std::function<cplx(std::size_t, double)>& fn) {
    const PeriodicGrid& g = u.grid();
    std::vector<cplx> c = u.spectrum();
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (c[i] == cplx{0.0, 0.0}) continue;
        c[i] *= fn(i, g.freq_norm_sq(i));
    }
    return GridFunction::from_spectrum(g, std::move(c));
}

void require_mean_free(const GridFunction& u, bool project, const char* op) {
    if (project) return;
    const double scale = std::max(u.max_abs(), 1.0);
    if (std::abs(u.mean()) > 1e-13 * scale)
        throw ConfigError(std::string(op) +
                          " requires a mean-free input (or the projection flag)");
}

// Signed frequency along `axis` for the flat spectral index, with the
// Nyquist mode mapped to 0 (odd multipliers only).
double odd_freq(const PeriodicGrid& g, std::size_t flat, int axis) {
    const int n = g.points_per_axis;
    int idx = g.dim == 1 ? static_cast<int>(flat)
                         : (axis == 0 ? static_cast<int>(flat) / n
                                      : static_cast<int>(flat) % n);
    int k = g.freq(idx);
    return k == -n / 2 ? 0.0 : static_cast<double>(k);
}

}  // namespace

GridFunction bessel_potential(const GridFunction& u, MultiplierOrder order) {
    check_order(order.real_part);
    if (!std::isfinite(order.imag_part))
        throw ConfigError("imaginary multiplier order must be finite");
    const double s = order.real_part, t = order.imag_part;
    return apply_symbol(u, [s, t](std::size_t, double k2) {
        const double logb = std::log1p(kFourPiSq * k2);
        const double mag = std::exp(-0.5 * s * logb);
        if (t == 0.0) return cplx{mag, 0.0};
        const double phase = -0.5 * t * logb;
        return cplx{mag * std::cos(phase), mag * std::sin(phase)};
    });
}

double bessel_kernel(double x_abs, double s, int n) {
    if (!(x_abs > 0.0)) throw ConfigError("bessel_kernel requires |x| > 0");
    if (!(s > 0.0)) throw ConfigError("bessel_kernel requires s > 0");
    check_order(s);
    if (n != 1 && n != 2) throw ConfigError("bessel_kernel supports n in {1,2}");

    const double pi = kTwoPi / 2.0;
    const double c = 1.0 / (std::pow(4.0 * pi, s / 2.0) * std::tgamma(s / 2.0));
    const double x2pi = pi * x_abs * x_abs;
    const double ex = 0.5 * (s - n);
    auto integrand = [&](double tau) {
        const double t = std::exp(tau);
        const double a = -t / (4.0 * pi) - x2pi / t + ex * tau;
        return a < -700.0 ? 0.0 : std::exp(a);
    };

    // For |x| below ~e^-20 the Gaussian cutoff sits under tau = -40; extend
    // the window so the singular mass near t ~ x^2 stays inside it.
    const double lo = std::min(-40.0, 2.0 * std::log(x_abs) - 10.0), hi = 40.0;
    std::size_t panels = 128;
    double step = (hi - lo) / static_cast<double>(panels);
    double sum = 0.5 * (integrand(lo) + integrand(hi));
    for (std::size_t i = 1; i < panels; ++i) sum += integrand(lo + step * i);
    double value = sum * step;

    for (int pass = 0; pass < 18; ++pass) {
        // refine by adding midpoints
        double add = 0.0;
        for (std::size_t i = 0; i < panels; ++i) add += integrand(lo + step * (i + 0.5));
        panels *= 2;
        step *= 0.5;
        sum += add;
        const double next = sum * step;
        const bool done = std::abs(next - value) <= 1e-9 * std::abs(next) && pass >= 2;
        value = next;
        if (done) return c * value;
    }
    std::ostringstream msg;
    msg << "bessel_kernel quadrature did not converge (x=" << x_abs << ", s=" << s
        << ", n=" << n << ", last=" << c * value << ")";
    throw NumericError(msg.str());
}

GridFunction riesz_potential(const GridFunction& u, double s, bool project_mean) {
    const int n = u.grid().dim;
    if (!(s > 0.0 && s < static_cast<double>(n)))
        throw ConfigError("riesz potential requires 0 < s < n");
    require_mean_free(u, project_mean, "riesz_potential");
    return apply_symbol(u, [s](std::size_t i, double k2) {
        if (i == 0) return cplx{0.0, 0.0};
        return cplx{std::pow(kTwoPi * std::sqrt(k2), -s), 0.0};
    });
}

std::vector<GridFunction> riesz_transform(const GridFunction& u, bool project_mean) {
    require_mean_free(u, project_mean, "riesz_transform");
    const PeriodicGrid& g = u.grid();
    std::vector<GridFunction> out;
    out.reserve(g.dim);
    for (int axis = 0; axis < g.dim; ++axis) {
        out.push_back(apply_symbol(u, [&g, axis](std::size_t i, double k2) {
            if (i == 0 || k2 == 0.0) return cplx{0.0, 0.0};
            return cplx{0.0, -odd_freq(g, i, axis) / std::sqrt(k2)};
        }));
    }
    return out;
}

std::vector<GridFunction> fractional_gradient(const GridFunction& u, double s,
                                              bool project_mean) {
    if (!(s > 0.0 && s < 1.0)) throw ConfigError("fractional gradient requires s in (0,1)");
    require_mean_free(u, project_mean, "fractional_gradient");
    const PeriodicGrid& g = u.grid();
    std::vector<GridFunction> out;
    out.reserve(g.dim);
    for (int axis = 0; axis < g.dim; ++axis) {
        out.push_back(apply_symbol(u, [&g, axis, s](std::size_t i, double k2) {
            if (i == 0 || k2 == 0.0) return cplx{0.0, 0.0};
            const double mag = std::pow(kTwoPi * std::sqrt(k2), s);
            return cplx{0.0, odd_freq(g, i, axis) / std::sqrt(k2) * mag};
        }));
    }
    return out;
}

GridFunction spectral_derivative(const GridFunction& u, int axis) {
    const PeriodicGrid& g = u.grid();
    if (axis < 0 || axis >= g.dim) throw ConfigError("derivative axis out of range");
    return apply_symbol(u, [&g, axis](std::size_t i, double) {
        return cplx{0.0, kTwoPi * odd_freq(g, i, axis)};
    });
}

std::vector<GridFunction> spectral_gradient(const GridFunction& u) {
    std::vector<GridFunction> out;
    for (int axis = 0; axis < u.grid().dim; ++axis)
        out.push_back(spectral_derivative(u, axis));
    return out;
}

GridFunction fftc_reconstruct(const std::vector<GridFunction>& grad, double s) {
    if (grad.empty()) throw ConfigError("fftc_reconstruct: empty gradient");
    const PeriodicGrid& g = grad.front().grid();
    if (static_cast<int>(grad.size()) != g.dim)
        throw ConfigError("fftc_reconstruct: component count does not match dim");
    for (const auto& comp : grad)
        if (!(comp.grid() == g)) throw ConfigError("fftc_reconstruct: grid mismatch");
    if (!(s > 0.0 && s < 1.0)) throw ConfigError("fftc_reconstruct requires s in (0,1)");

    // out_k = (2*pi*|k|)^(-s) * sum_j (-i*k_j/|k|) * G_j,k
    std::vector<cplx> c(g.point_count(), 0.0);
    for (std::size_t i = 1; i < c.size(); ++i) {
        const double k2 = g.freq_norm_sq(i);
        if (k2 == 0.0) continue;
        const double invnorm = 1.0 / std::sqrt(k2);
        cplx dot = 0.0;
        for (int axis = 0; axis < g.dim; ++axis)
            dot += cplx{0.0, -odd_freq(g, i, axis) * invnorm} * grad[axis].spectrum()[i];
        c[i] = std::pow(kTwoPi * std::sqrt(k2), -s) * dot;
    }
    return GridFunction::from_spectrum(g, std::move(c));
}

double mihlin_ratio(const GridFunction& u, double t, double p) {
    const double base = quadrature_lp(u, p);
    if (base == 0.0) throw ConfigError("mihlin_ratio requires a nonzero input");
    const double shifted = quadrature_lp(bessel_potential(u, {0.0, t}), p);
    const double weight = std::pow(1.0 + kFourPiSq * t * t, u.grid().dim / 2.0);
    return shifted / (weight * base);
}

}  // namespace fracsob
