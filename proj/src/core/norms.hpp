#pragma once

#include <span>
#include <string>
#include <vector>

#include "core/grid.hpp"

namespace fracsob {

// ---- decreasing rearrangement ----------------------------------------------

// Step profile of |u| on [0, 1]: values[i] is the level on
// [i*piece, (i+1)*piece), values nonincreasing, piece = cell volume.
struct Rearrangement {
    std::vector<double> values;
    double piece = 0.0;

    double total_measure() const { return piece * static_cast<double>(values.size()); }
    // int_0^t f*(tau) dtau, saturating at ||u||_1 for t >= total measure.
    double integral_to(double t) const;
    double lp_norm(double p) const;
};

Rearrangement decreasing_rearrangement(const GridFunction& u);

// ---- norm evaluators ---------------------------------------------------------

// ||L_{-s} u||_p, p in (1, inf); any real s (the multiplier handles negative
// orders directly).
double bessel_norm(const GridFunction& u, double s, double p);

// ||u||_p + || |grad u| ||_p with the spectral gradient (pointwise Euclidean
// magnitude across components).
double sobolev_w1p_norm(const GridFunction& u, double p);

// Torus Gagliardo seminorm: double sum over ordered grid pairs excluding the
// zero offset, wrapped distance, midpoint-rule weights.
double gagliardo_seminorm(const GridFunction& u, double s, double p);
// ||u||_p + gagliardo_seminorm.
double gagliardo_wsp_norm(const GridFunction& u, double s, double p);

// max over grid pairs of |u(x)-u(y)| / d(x,y)^mu. Full pair scan for dim 1;
// for dim 2 the offset set is subsampled with stride max(1, N/32) beyond a
// fully scanned |offset| <= 8 core.
double holder_seminorm(const GridFunction& u, double mu);

// Dyadic mean-oscillation sup over cubes of side 2^-l, l = 0..log2(N).
double bmo_norm(const GridFunction& u);

// sup over the same dyadic cubes of r^(-lambda/p) (int_Q |u-u_Q|^p)^(1/p)
// with r = cube side. 0 <= lambda <= dim + p. campanato(u, 1, dim) equals
// bmo_norm exactly on this cube family.
double campanato_seminorm(const GridFunction& u, double p, double lambda);

// Exact piecewise evaluation of (int_0^inf (t^(1/p) f*(t))^q dt/t)^(1/q) on
// the step rearrangement; sup form for q = inf.
double lorentz_norm(const Rearrangement& r, double p, double q);
double lorentz_norm(const GridFunction& u, double p, double q);

// inf{||g||_1 + ||h||_inf : u = g + h}; on the unit-measure torus this is
// int_0^1 f*.
double sum_norm_l1_linf(const GridFunction& u);

// (sum_m (2^(m*s) |x_m|)^q)^(1/q), sup form for q = inf.
double sequence_norm_lsq(std::span<const cplx> x, double s, double q);
double sequence_norm_lsq(std::span<const double> x_abs, double s, double q);

// ---- embedding exponents -----------------------------------------------------

enum class Regime { Subcritical, Critical, Supercritical };

struct Conjugates {
    Regime regime;
    double p_star = 0.0;   // subcritical target exponent n*p/(n-s*p)
    double mu_star = 0.0;  // supercritical Hoelder exponent s - n/p
};

Conjugates conjugates(int n, double s, double p);

// ---- space descriptions --------------------------------------------------------

enum class SpaceFamily {
    Lp,
    W1p,
    Hsp,
    GagliardoWsp,
    Holder,
    BMO,
    Campanato,
    Lorentz,
    SumL1Linf,
    MaxLp0Lp1,
};

struct SpaceSpec {
    SpaceFamily family = SpaceFamily::Lp;
    double s = 0.0;
    double p = 2.0;
    double q = 2.0;
    double mu = 0.5;
    double lambda = 0.0;
    double p0 = 1.0;
    double p1 = kInf;
    std::string text;

    // Textual formats: Lp:p=2  W1p:p=2  Hsp:s=0.5,p=2  Wsp:s=0.5,p=2
    // Holder:mu=0.25  BMO  Camp:p=2,lam=1  Lorentz:p=4,q=2  Sum
    // Max:p0=1,p1=inf.  "inf" is accepted wherever an exponent may be infinite.
    static SpaceSpec parse(const std::string& text);
};

double space_norm(const GridFunction& u, const SpaceSpec& spec);

}  // namespace fracsob
