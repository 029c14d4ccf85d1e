#pragma once

#include <vector>

#include "core/grid.hpp"

namespace fracsob {

// Order sigma = real_part + i*imag_part of the smoothing operator with
// symbol (1 + 4*pi^2*|k|^2)^(-sigma/2). |real_part| <= 8 is enforced as a
// numerical-range guard.
struct MultiplierOrder {
    double real_part = 0.0;
    double imag_part = 0.0;
};

// Modewise multiplication by (1 + 4*pi^2*|k|^2)^(-sigma/2). The base is real
// and positive, so the complex power is the single-valued principal branch.
GridFunction bessel_potential(const GridFunction& u, MultiplierOrder order);

// Kernel G_s(x) realizing the potential for s > 0, by adaptive quadrature of
//   G_s(x) = c(s) * int_0^inf exp(-t/(4*pi)) exp(-pi*|x|^2/t) t^((s-n)/2) dt/t
// with c(s) = ((4*pi)^(s/2) Gamma(s/2))^(-1), the constant that makes
// ||G_s||_1 = 1. Substitution t = e^tau, trapezoid doubling on [-40, 40]
// until the relative change is < 1e-9.
double bessel_kernel(double x_abs, double s, int n);

// Inverse-order smoothing on the mean-free part: spectrum times
// (2*pi*|k|)^(-s) for k != 0, zero at k = 0. Requires c_0 = 0 unless
// project_mean is set, in which case the mean is dropped.
GridFunction riesz_potential(const GridFunction& u, double s, bool project_mean = false);

// Component j carries the symbol -i*k_j/|k| (zero at k = 0).
std::vector<GridFunction> riesz_transform(const GridFunction& u, bool project_mean = false);

// Fractional gradient: component j has symbol i*(k_j/|k|)*(2*pi*|k|)^s,
// s in (0,1). Equals both operator orderings through the plain gradient.
std::vector<GridFunction> fractional_gradient(const GridFunction& u, double s,
                                              bool project_mean = false);

// Plain spectral derivative d/dx_j, symbol 2*pi*i*k_j. The Nyquist mode
// k_j = -N/2 is zeroed in odd multipliers (here and in the two operators
// above) to avoid the ambiguous conjugate pairing.
GridFunction spectral_derivative(const GridFunction& u, int axis);
std::vector<GridFunction> spectral_gradient(const GridFunction& u);

// Reconstruction u = I_s( R . G ) from G = fractional_gradient(u, s).
GridFunction fftc_reconstruct(const std::vector<GridFunction>& grad, double s);

// ||L_{it} u||_p / ((1 + 4*pi^2 t^2)^(n/2) ||u||_p); the imaginary-order
// operator norm probe. Zero input is a domain error.
double mihlin_ratio(const GridFunction& u, double t, double p);

}  // namespace fracsob
