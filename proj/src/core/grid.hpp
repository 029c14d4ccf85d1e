#pragma once

#include <complex>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "core/errors.hpp"

namespace fracsob {

using cplx = std::complex<double>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Uniform grid on the unit torus [0,1)^dim with N points per axis,
// N a power of two >= 4. Point layout is row-major: for dim == 2 the flat
// index is i0 * N + i1 and the point is (i0/N, i1/N).
struct PeriodicGrid {
    int dim = 1;
    int points_per_axis = 0;

    static PeriodicGrid make(int dim, int points_per_axis);

    std::size_t point_count() const;
    double cell_volume() const;

    // FFT-layout index along one axis -> signed frequency in [-N/2, N/2).
    int freq(int axis_index) const {
        return axis_index < points_per_axis / 2 ? axis_index
                                                : axis_index - points_per_axis;
    }
    // |k|^2 for the flat spectral index.
    double freq_norm_sq(std::size_t flat) const;

    bool operator==(const PeriodicGrid& o) const = default;
};

// Sampled complex-valued function together with its Fourier coefficients.
// Convention: c_k = integral f(x) e^{-2*pi*i k.x} dx, approximated by the
// rectangle rule (exact for band-limited f), and f(x_j) = sum_k c_k
// e^{2*pi*i k.x_j}. Both representations are computed at construction and
// the object is immutable afterwards.
class GridFunction {
public:
    static GridFunction from_samples(const PeriodicGrid& g, std::vector<cplx> samples);
    static GridFunction from_spectrum(const PeriodicGrid& g, std::vector<cplx> spectrum);

    const PeriodicGrid& grid() const { return grid_; }
    const std::vector<cplx>& samples() const { return samples_; }
    const std::vector<cplx>& spectrum() const { return spectrum_; }

    cplx mean() const { return spectrum_[0]; }
    double max_abs() const;

    GridFunction with_zero_mean() const;
    GridFunction truncated_to_band(int band) const;
    GridFunction scaled(cplx factor) const;

    // Resample the trigonometric polynomial on a finer grid (same torus
    // function, band unchanged). points_per_axis must be >= the source N.
    GridFunction resampled(int points_per_axis) const;

private:
    GridFunction(PeriodicGrid g, std::vector<cplx> s, std::vector<cplx> c)
        : grid_(g), samples_(std::move(s)), spectrum_(std::move(c)) {}

    PeriodicGrid grid_;
    std::vector<cplx> samples_;
    std::vector<cplx> spectrum_;
};

GridFunction lin_comb(cplx a, const GridFunction& u, cplx b, const GridFunction& v);

namespace detail {
// Raw transform for hot loops that keep their own buffers. forward = true
// maps samples to integral-normalized coefficients; false inverts.
void dft(const PeriodicGrid& g, const std::vector<cplx>& in, std::vector<cplx>& out,
         bool forward);
}  // namespace detail

// Rectangle-rule (integral |u|^p)^(1/p); exact max of samples for p = inf.
double quadrature_lp(const GridFunction& u, double p);

// ---- test-function generation ----------------------------------------------

struct RandomBandlimited {
    int band = 8;
    std::uint64_t seed = 0;
    bool zero_mean = false;
};
struct GaussianBump {
    std::vector<double> center;  // one entry per axis
    double width = 0.1;
};
struct Indicator {
    // Product of half-open intervals [a_j, b_j) in [0,1), one per axis.
    std::vector<std::pair<double, double>> intervals;
};
struct ExplicitSpectrum {
    std::vector<std::pair<std::vector<int>, cplx>> coeffs;
};

struct FunctionSpec {
    std::variant<RandomBandlimited, GaussianBump, Indicator, ExplicitSpectrum> kind;
    std::optional<double> l2_target;  // optional normalization of the L2 norm
    std::string text;                 // original textual form, for labels
};

// Textual mini-format, e.g.
//   rand:band=8,seed=7,zero-mean
//   bump:c=0.5,w=0.1            (dim 2: c=(0.5,0.25))
//   ind:[0.2,0.5)               (dim 2: [0.2,0.5)x[0.1,0.3))
//   spec:{k=0:1}  spec:{k=1:1,k=-1:1}  spec:{k=(1,0):0.5+0.5i}
//   spec:file=coeffs.json       (JSON array of {"k":[...],"re":..,"im":..})
// Any form may end with ,l2=<value>.
FunctionSpec parse_function_spec(const std::string& text);

GridFunction synthesize(const FunctionSpec& spec, const PeriodicGrid& grid);

}  // namespace fracsob
