#include "core/grid.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>

#include <nlohmann/json.hpp>

#include "core/rng.hpp"

namespace fracsob {

namespace {


bool is_pow2(int n) { return n >= 1 && (n & (n - 1)) == 0; }

// One planner entry per (dim, N, sign). FFTW's planner is not thread-safe;
// fftw_execute_dft on distinct buffers is.
struct PlanEntry {
    fftw_plan plan = nullptr;
    std::vector<cplx> in, out;  // keep ESTIMATE-time buffers alive
};

std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

fftw_plan get_plan(const PeriodicGrid& g, int sign) {
    static std::map<std::tuple<int, int, int>, PlanEntry> cache;
    std::lock_guard<std::mutex> lock(planner_mutex());
    auto key = std::make_tuple(g.dim, g.points_per_axis, sign);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second.plan;
    PlanEntry e;
    e.in.resize(g.point_count());
    e.out.resize(g.point_count());
    auto* in = reinterpret_cast<fftw_complex*>(e.in.data());
    auto* out = reinterpret_cast<fftw_complex*>(e.out.data());
    const int n = g.points_per_axis;
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    e.plan = g.dim == 1 ? fftw_plan_dft_1d(n, in, out, sign, flags)
                        : fftw_plan_dft_2d(n, n, in, out, sign, flags);
    return cache.emplace(key, std::move(e)).first->second.plan;
}

std::vector<cplx> run_dft(const PeriodicGrid& g, const std::vector<cplx>& data, int sign) {
    fftw_plan plan = get_plan(g, sign);
    std::vector<cplx> in = data;  // fftw_execute_dft may not alias in == out
    std::vector<cplx> out(data.size());
    fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(in.data()),
                     reinterpret_cast<fftw_complex*>(out.data()));
    return out;
}

// samples -> coefficients, scaled by the cell volume so that c_k approximates
// the integral form.
std::vector<cplx> dft_forward(const PeriodicGrid& g, const std::vector<cplx>& samples) {
    std::vector<cplx> c = run_dft(g, samples, FFTW_FORWARD);
    const double h = g.cell_volume();
    for (auto& v : c) v *= h;
    return c;
}

std::vector<cplx> dft_inverse(const PeriodicGrid& g, const std::vector<cplx>& spectrum) {
    return run_dft(g, spectrum, FFTW_BACKWARD);
}

}  // namespace

namespace detail {

void dft(const PeriodicGrid& g, const std::vector<cplx>& in, std::vector<cplx>& out,
         bool forward) {
    fftw_plan plan = get_plan(g, forward ? FFTW_FORWARD : FFTW_BACKWARD);
    out.resize(in.size());
    std::vector<cplx> tmp = in;  // execute_dft may not alias in == out
    fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(tmp.data()),
                     reinterpret_cast<fftw_complex*>(out.data()));
    if (forward) {
        const double h = g.cell_volume();
        for (auto& v : out) v *= h;
    }
}

}  // namespace detail

PeriodicGrid PeriodicGrid::make(int dim, int points_per_axis) {
    if (dim != 1 && dim != 2)
        throw ConfigError("grid dim must be 1 or 2, got " + std::to_string(dim));
    if (points_per_axis < 4 || !is_pow2(points_per_axis))
        throw ConfigError("points per axis must be a power of two >= 4, got " +
                          std::to_string(points_per_axis));
    return PeriodicGrid{dim, points_per_axis};
}

std::size_t PeriodicGrid::point_count() const {
    std::size_t n = static_cast<std::size_t>(points_per_axis);
    return dim == 1 ? n : n * n;
}

double PeriodicGrid::cell_volume() const {
    return 1.0 / static_cast<double>(point_count());
}

double PeriodicGrid::freq_norm_sq(std::size_t flat) const {
    const int n = points_per_axis;
    if (dim == 1) {
        const double k = freq(static_cast<int>(flat));
        return k * k;
    }
    const double k0 = freq(static_cast<int>(flat) / n);
    const double k1 = freq(static_cast<int>(flat) % n);
    return k0 * k0 + k1 * k1;
}

GridFunction GridFunction::from_samples(const PeriodicGrid& g, std::vector<cplx> samples) {
    if (samples.size() != g.point_count())
        throw ConfigError("sample count does not match grid size");
    std::vector<cplx> spec = dft_forward(g, samples);
    return GridFunction(g, std::move(samples), std::move(spec));
}

GridFunction GridFunction::from_spectrum(const PeriodicGrid& g, std::vector<cplx> spectrum) {
    if (spectrum.size() != g.point_count())
        throw ConfigError("coefficient count does not match grid size");
    std::vector<cplx> samples = dft_inverse(g, spectrum);
    return GridFunction(g, std::move(samples), std::move(spectrum));
}

double GridFunction::max_abs() const {
    double m = 0.0;
    for (const auto& v : samples_) m = std::max(m, std::abs(v));
    return m;
}

GridFunction GridFunction::with_zero_mean() const {
    std::vector<cplx> c = spectrum_;
    c[0] = 0.0;
    return from_spectrum(grid_, std::move(c));
}

GridFunction GridFunction::truncated_to_band(int band) const {
    const int n = grid_.points_per_axis;
    std::vector<cplx> c = spectrum_;
    for (std::size_t i = 0; i < c.size(); ++i) {
        int kmax;
        if (grid_.dim == 1) {
            kmax = std::abs(grid_.freq(static_cast<int>(i)));
        } else {
            kmax = std::max(std::abs(grid_.freq(static_cast<int>(i) / n)),
                            std::abs(grid_.freq(static_cast<int>(i) % n)));
        }
        if (kmax > band) c[i] = 0.0;
    }
    return from_spectrum(grid_, std::move(c));
}

GridFunction GridFunction::scaled(cplx factor) const {
    std::vector<cplx> c = spectrum_;
    for (auto& v : c) v *= factor;
    return from_spectrum(grid_, std::move(c));
}

GridFunction GridFunction::resampled(int points_per_axis) const {
    if (points_per_axis == grid_.points_per_axis) return *this;
    if (points_per_axis < grid_.points_per_axis)
        throw ConfigError("resampling only onto finer grids");
    PeriodicGrid fine = PeriodicGrid::make(grid_.dim, points_per_axis);
    std::vector<cplx> c(fine.point_count(), 0.0);
    const int n = grid_.points_per_axis;
    const int m = fine.points_per_axis;
    auto wrap = [](int k, int size) { return k >= 0 ? k : k + size; };
    if (grid_.dim == 1) {
        for (int i = 0; i < n; ++i) c[wrap(grid_.freq(i), m)] = spectrum_[i];
    } else {
        for (int i0 = 0; i0 < n; ++i0)
            for (int i1 = 0; i1 < n; ++i1) {
                const int j0 = wrap(grid_.freq(i0), m);
                const int j1 = wrap(grid_.freq(i1), m);
                c[static_cast<std::size_t>(j0) * m + j1] =
                    spectrum_[static_cast<std::size_t>(i0) * n + i1];
            }
    }
    return from_spectrum(fine, std::move(c));
}

GridFunction lin_comb(cplx a, const GridFunction& u, cplx b, const GridFunction& v) {
    if (!(u.grid() == v.grid())) throw ConfigError("lin_comb: grid mismatch");
    std::vector<cplx> c(u.spectrum().size());
    for (std::size_t i = 0; i < c.size(); ++i)
        c[i] = a * u.spectrum()[i] + b * v.spectrum()[i];
    return GridFunction::from_spectrum(u.grid(), std::move(c));
}

double quadrature_lp(const GridFunction& u, double p) {
    if (p == kInf) return u.max_abs();
    if (!(p >= 1.0)) throw ConfigError("Lp quadrature requires p >= 1");
    const double h = u.grid().cell_volume();
    double acc = 0.0;
    if (p == 2.0) {
        for (const auto& v : u.samples()) acc += std::norm(v);
    } else if (p == 1.0) {
        for (const auto& v : u.samples()) acc += std::abs(v);
    } else {
        for (const auto& v : u.samples()) acc += std::pow(std::abs(v), p);
    }
    return std::pow(h * acc, 1.0 / p);
}

// ---- FunctionSpec parsing ---------------------------------------------------

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    int depth = 0;
    for (char ch : s) {
        if (ch == '(' || ch == '[' || ch == '{') ++depth;
        if (ch == ')' || ch == ']' || ch == '}') --depth;
        if (ch == sep && depth == 0) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    out.push_back(cur);
    return out;
}

double parse_num(const std::string& s, const std::string& ctx) {
    try {
        std::size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("bad number '" + s + "' in " + ctx);
    }
}

// "0.3", "-1.5i", "0.5+0.5i", "1-2i"
cplx parse_cplx(const std::string& s, const std::string& ctx) {
    std::string t = s;
    if (t.empty()) throw ConfigError("empty value in " + ctx);
    if (t.back() == 'i') {
        t.pop_back();
        // find split between real and imaginary parts
        for (std::size_t i = t.size(); i-- > 1;) {
            if ((t[i] == '+' || t[i] == '-') && t[i - 1] != 'e' && t[i - 1] != 'E') {
                double re = parse_num(t.substr(0, i), ctx);
                std::string im = t.substr(i);
                if (im == "+") im = "1";
                if (im == "-") im = "-1";
                return {re, parse_num(im, ctx)};
            }
        }
        if (t.empty() || t == "+") return {0.0, 1.0};
        if (t == "-") return {0.0, -1.0};
        return {0.0, parse_num(t, ctx)};
    }
    return {parse_num(t, ctx), 0.0};
}

std::vector<double> parse_point(const std::string& s, const std::string& ctx) {
    if (s.size() >= 2 && s.front() == '(' && s.back() == ')') {
        std::vector<double> out;
        for (const auto& part : split(s.substr(1, s.size() - 2), ','))
            out.push_back(parse_num(part, ctx));
        return out;
    }
    return {parse_num(s, ctx)};
}

std::vector<int> parse_freq(const std::string& s, const std::string& ctx) {
    std::vector<int> out;
    for (double v : parse_point(s, ctx)) {
        if (v != std::floor(v)) throw ConfigError("non-integer frequency in " + ctx);
        out.push_back(static_cast<int>(v));
    }
    return out;
}

ExplicitSpectrum parse_inline_spectrum(const std::string& body) {
    ExplicitSpectrum es;
    for (const auto& entry : split(body, ',')) {
        auto eq = entry.find('=');
        auto colon = entry.rfind(':');
        if (eq == std::string::npos || colon == std::string::npos || colon < eq ||
            entry.substr(0, eq) != "k")
            throw ConfigError("bad spectrum entry '" + entry + "'");
        es.coeffs.emplace_back(parse_freq(entry.substr(eq + 1, colon - eq - 1), "spec"),
                               parse_cplx(entry.substr(colon + 1), "spec"));
    }
    return es;
}

ExplicitSpectrum load_spectrum_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open spectrum file '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ConfigError("bad JSON in '" + path + "': " + e.what());
    }
    if (!j.is_array()) throw ConfigError("spectrum file must hold a JSON array");
    ExplicitSpectrum es;
    for (const auto& item : j) {
        if (!item.contains("k")) throw ConfigError("spectrum entry missing 'k'");
        std::vector<int> k = item.at("k").get<std::vector<int>>();
        const double re = item.value("re", 0.0);
        const double im = item.value("im", 0.0);
        es.coeffs.emplace_back(std::move(k), cplx{re, im});
    }
    return es;
}

}  // namespace

FunctionSpec parse_function_spec(const std::string& text) {
    auto colon = text.find(':');
    const std::string kind = text.substr(0, colon);
    std::string body = colon == std::string::npos ? "" : text.substr(colon + 1);

    FunctionSpec spec;
    spec.text = text;

    // peel a trailing ,l2=<v> off any form
    auto parts = split(body, ',');
    std::vector<std::string> kept;
    for (const auto& part : parts) {
        if (part.rfind("l2=", 0) == 0)
            spec.l2_target = parse_num(part.substr(3), text);
        else
            kept.push_back(part);
    }

    if (kind == "rand") {
        RandomBandlimited rb;
        bool have_band = false, have_seed = false;
        for (const auto& part : kept) {
            if (part.rfind("band=", 0) == 0) {
                rb.band = static_cast<int>(parse_num(part.substr(5), text));
                have_band = true;
            } else if (part.rfind("seed=", 0) == 0) {
                rb.seed = static_cast<std::uint64_t>(parse_num(part.substr(5), text));
                have_seed = true;
            } else if (part == "zero-mean") {
                rb.zero_mean = true;
            } else {
                throw ConfigError("unknown key '" + part + "' in " + text);
            }
        }
        if (!have_band || !have_seed)
            throw ConfigError("rand spec needs band= and seed=: " + text);
        spec.kind = rb;
    } else if (kind == "bump") {
        GaussianBump gb;
        for (const auto& part : kept) {
            if (part.rfind("c=", 0) == 0)
                gb.center = parse_point(part.substr(2), text);
            else if (part.rfind("w=", 0) == 0)
                gb.width = parse_num(part.substr(2), text);
            else
                throw ConfigError("unknown key '" + part + "' in " + text);
        }
        if (gb.center.empty() || gb.width <= 0.0)
            throw ConfigError("bump spec needs c= and w>0: " + text);
        spec.kind = gb;
    } else if (kind == "ind") {
        Indicator ind;
        std::string rest;
        for (const auto& part : kept) rest += (rest.empty() ? "" : ",") + part;
        for (const auto& iv : split(rest, 'x')) {
            if (iv.size() < 5 || iv.front() != '[' || iv.back() != ')')
                throw ConfigError("indicator interval must look like [a,b): " + text);
            auto nums = split(iv.substr(1, iv.size() - 2), ',');
            if (nums.size() != 2) throw ConfigError("bad interval in " + text);
            double a = parse_num(nums[0], text), b = parse_num(nums[1], text);
            if (!(0.0 <= a && a < b && b <= 1.0))
                throw ConfigError("interval must satisfy 0 <= a < b <= 1: " + text);
            ind.intervals.emplace_back(a, b);
        }
        spec.kind = ind;
    } else if (kind == "spec") {
        std::string rest;
        for (const auto& part : kept) rest += (rest.empty() ? "" : ",") + part;
        if (rest.rfind("file=", 0) == 0)
            spec.kind = load_spectrum_file(rest.substr(5));
        else if (rest.size() >= 2 && rest.front() == '{' && rest.back() == '}')
            spec.kind = parse_inline_spectrum(rest.substr(1, rest.size() - 2));
        else
            throw ConfigError("spec form must be {..} or file=path: " + text);
    } else {
        throw ConfigError("unknown function kind '" + kind + "'");
    }
    return spec;
}

namespace {

double wrap_dist(double a, double b) {
    double d = std::abs(a - b);
    return std::min(d, 1.0 - d);
}

GridFunction synth_random(const RandomBandlimited& rb, const PeriodicGrid& g) {
    const int n = g.points_per_axis;
    if (rb.band < 1 || rb.band > n / 2 - 1)
        throw ConfigError("band must lie in [1, N/2-1] to avoid aliasing");
    std::vector<cplx> c(g.point_count(), 0.0);
    Rng rng(rb.seed);
    auto idx = [&](int k0, int k1) {
        auto w = [&](int k) { return k >= 0 ? k : k + n; };
        return g.dim == 1 ? static_cast<std::size_t>(w(k0))
                          : static_cast<std::size_t>(w(k0)) * n + w(k1);
    };
    // Hermitian pairs in a fixed order so that samples are real and the
    // sequence is reproducible bit-for-bit from the seed.
    if (g.dim == 1) {
        if (!rb.zero_mean) c[0] = rng.next_normal();
        for (int k = 1; k <= rb.band; ++k) {
            cplx v(rng.next_normal(), rng.next_normal());
            v *= 0.70710678118654752440;
            c[idx(k, 0)] = v;
            c[idx(-k, 0)] = std::conj(v);
        }
    } else {
        if (!rb.zero_mean) c[0] = rng.next_normal();
        for (int k0 = -rb.band; k0 <= rb.band; ++k0)
            for (int k1 = -rb.band; k1 <= rb.band; ++k1) {
                if (k0 < 0 || (k0 == 0 && k1 <= 0)) continue;  // positive half
                cplx v(rng.next_normal(), rng.next_normal());
                v *= 0.70710678118654752440;
                c[idx(k0, k1)] = v;
                c[idx(-k0, -k1)] = std::conj(v);
            }
    }
    return GridFunction::from_spectrum(g, std::move(c));
}

GridFunction synth_bump(const GaussianBump& gb, const PeriodicGrid& g) {
    std::vector<double> center = gb.center;
    if (static_cast<int>(center.size()) == 1 && g.dim == 2)
        center.push_back(center[0]);
    if (static_cast<int>(center.size()) != g.dim)
        throw ConfigError("bump center dimension does not match grid");
    const int n = g.points_per_axis;
    std::vector<cplx> s(g.point_count());
    const double inv2w2 = 1.0 / (2.0 * gb.width * gb.width);
    for (std::size_t i = 0; i < s.size(); ++i) {
        double d2;
        if (g.dim == 1) {
            double d = wrap_dist(static_cast<double>(i) / n, center[0]);
            d2 = d * d;
        } else {
            double d0 = wrap_dist(static_cast<double>(i / n) / n, center[0]);
            double d1 = wrap_dist(static_cast<double>(i % n) / n, center[1]);
            d2 = d0 * d0 + d1 * d1;
        }
        s[i] = std::exp(-d2 * inv2w2);
    }
    return GridFunction::from_samples(g, std::move(s));
}

GridFunction synth_indicator(const Indicator& ind, const PeriodicGrid& g) {
    std::vector<std::pair<double, double>> iv = ind.intervals;
    if (static_cast<int>(iv.size()) == 1 && g.dim == 2) iv.push_back(iv[0]);
    if (static_cast<int>(iv.size()) != g.dim)
        throw ConfigError("indicator interval count does not match grid dim");
    const int n = g.points_per_axis;
    auto inside = [](double x, const std::pair<double, double>& ab) {
        return ab.first <= x && x < ab.second;
    };
    std::vector<cplx> s(g.point_count());
    for (std::size_t i = 0; i < s.size(); ++i) {
        bool in;
        if (g.dim == 1) {
            in = inside(static_cast<double>(i) / n, iv[0]);
        } else {
            in = inside(static_cast<double>(i / n) / n, iv[0]) &&
                 inside(static_cast<double>(i % n) / n, iv[1]);
        }
        s[i] = in ? 1.0 : 0.0;
    }
    return GridFunction::from_samples(g, std::move(s));
}

GridFunction synth_explicit(const ExplicitSpectrum& es, const PeriodicGrid& g) {
    const int n = g.points_per_axis;
    std::vector<cplx> c(g.point_count(), 0.0);
    for (const auto& [k, v] : es.coeffs) {
        std::vector<int> kk = k;
        if (static_cast<int>(kk.size()) != g.dim)
            throw ConfigError("frequency dimension does not match grid");
        std::size_t flat = 0;
        for (int j = 0; j < g.dim; ++j) {
            if (std::abs(kk[j]) > n / 2 - 1)
                throw ConfigError("frequency beyond band limit N/2-1");
            int w = kk[j] >= 0 ? kk[j] : kk[j] + n;
            flat = flat * n + static_cast<std::size_t>(w);
        }
        c[flat] += v;
    }
    return GridFunction::from_spectrum(g, std::move(c));
}

}  // namespace

GridFunction synthesize(const FunctionSpec& spec, const PeriodicGrid& grid) {
    GridFunction u = std::visit(
        [&](const auto& k) -> GridFunction {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, RandomBandlimited>) return synth_random(k, grid);
            if constexpr (std::is_same_v<T, GaussianBump>) return synth_bump(k, grid);
            if constexpr (std::is_same_v<T, Indicator>) return synth_indicator(k, grid);
            if constexpr (std::is_same_v<T, ExplicitSpectrum>) return synth_explicit(k, grid);
        },
        spec.kind);
    if (spec.l2_target) {
        double norm = quadrature_lp(u, 2.0);
        if (norm == 0.0) throw NumericError("cannot normalize the zero function");
        u = u.scaled(*spec.l2_target / norm);
    }
    return u;
}

}  // namespace fracsob
