#pragma once

#include "errors.hpp"
#include "fft.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <mutex>
#include <numbers>
#include <string>
#include <vector>

namespace prandtl {

using YArray = std::vector<double>;

// Periodic x in [0, lx), uniform y in [0, ymax] including both end points.
struct Grid2D {
    int nx = 0;
    int ny = 0;
    double lx = 2.0 * std::numbers::pi;
    double ymax = 30.0;

    Grid2D() = default;
    Grid2D(int nx_, int ny_, double lx_ = 2.0 * std::numbers::pi, double ymax_ = 30.0)
        : nx(nx_), ny(ny_), lx(lx_), ymax(ymax_) {
        if (nx < 8 || (nx & (nx - 1)) != 0)
            throw Error("grid", "Nx must be a power of two >= 8, got " + std::to_string(nx));
        if (ny < 32) throw Error("grid", "Ny must be at least 32, got " + std::to_string(ny));
        if (!(lx > 0) || !(ymax > 0)) throw Error("grid", "Lx and Ymax must be positive");
    }

    double dy() const { return ymax / (ny - 1); }
    double dx() const { return lx / nx; }
    double x(int ix) const { return lx * ix / nx; }
    double y(int iy) const { return iy == ny - 1 ? ymax : iy * dy(); }
    // Angular wavenumber of Fourier index k.
    double kappa(int k) const { return 2.0 * std::numbers::pi * k / lx; }
    size_t size() const { return static_cast<size_t>(nx) * ny; }

    std::vector<double> x_nodes() const {
        std::vector<double> v(nx);
        for (int i = 0; i < nx; ++i) v[i] = x(i);
        return v;
    }
    YArray y_nodes() const {
        YArray v(ny);
        for (int j = 0; j < ny; ++j) v[j] = y(j);
        return v;
    }

    bool operator==(const Grid2D&) const = default;
};

// Row-major samples: values[ix*ny + iy], so every x-row is a contiguous y-column.
struct Field {
    Grid2D grid;
    std::vector<double> values;

    Field() = default;
    explicit Field(const Grid2D& g, double fill = 0.0) : grid(g), values(g.size(), fill) {}

    template <class F>
    static Field sample(const Grid2D& g, F&& fn) {
        Field f(g);
        for (int i = 0; i < g.nx; ++i) {
            const double x = g.x(i);
            for (int j = 0; j < g.ny; ++j) f(i, j) = fn(x, g.y(j));
        }
        return f;
    }

    // x-independent field from a y-array.
    static Field from_y(const Grid2D& g, const YArray& col) {
        Field f(g);
        for (int i = 0; i < g.nx; ++i) std::copy(col.begin(), col.end(), f.row(i));
        return f;
    }

    double& operator()(int ix, int iy) { return values[static_cast<size_t>(ix) * grid.ny + iy]; }
    double operator()(int ix, int iy) const {
        return values[static_cast<size_t>(ix) * grid.ny + iy];
    }
    double* row(int ix) { return values.data() + static_cast<size_t>(ix) * grid.ny; }
    const double* row(int ix) const { return values.data() + static_cast<size_t>(ix) * grid.ny; }

    bool finite() const {
        return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
    }

    Field& operator+=(const Field& o) {
        for (size_t k = 0; k < values.size(); ++k) values[k] += o.values[k];
        return *this;
    }
    Field& operator-=(const Field& o) {
        for (size_t k = 0; k < values.size(); ++k) values[k] -= o.values[k];
        return *this;
    }
    Field& operator*=(double s) {
        for (double& v : values) v *= s;
        return *this;
    }
    // Pointwise product.
    Field& operator*=(const Field& o) {
        for (size_t k = 0; k < values.size(); ++k) values[k] *= o.values[k];
        return *this;
    }
    // Multiply every x-row by a y-profile.
    Field& scale_y(const YArray& w) {
        for (int i = 0; i < grid.nx; ++i) {
            double* r = row(i);
            for (int j = 0; j < grid.ny; ++j) r[j] *= w[j];
        }
        return *this;
    }
    Field& add_y(const YArray& w) {
        for (int i = 0; i < grid.nx; ++i) {
            double* r = row(i);
            for (int j = 0; j < grid.ny; ++j) r[j] += w[j];
        }
        return *this;
    }
};

inline Field operator+(Field a, const Field& b) { return a += b; }
inline Field operator-(Field a, const Field& b) { return a -= b; }
inline Field operator*(Field a, const Field& b) { return a *= b; }
inline Field operator*(double s, Field a) { return a *= s; }
inline Field operator*(Field a, const YArray& w) { return a.scale_y(w); }
inline Field operator*(const YArray& w, Field a) { return a.scale_y(w); }

// ---------------------------------------------------------------- x spectra

// Unnormalized DFT along x of every y-column, coeff[k*ny + iy] for k in [0, nx/2].
struct XSpectrum {
    Grid2D grid;
    std::vector<std::complex<double>> coeff;
    double peak = 0.0;  // largest |coefficient|
    double floor = 0.0; // coefficients at or below this are treated as noise

    // Coefficients below this fraction of the peak are rounding noise; the
    // (i kappa)^m factor would otherwise lift them to O(1) for m near Nx/4.
    static constexpr double kNoiseFloor = 1e-13;
    // Fields built from products and quotients carry a flat noise plateau
    // well above plain rounding. Modes beyond the Nx/4 guard hold nothing
    // else in resolved data, so the floor sits this factor above their max.
    static constexpr double kPlateauMargin = 10.0;

    static XSpectrum of(const Field& f) {
        XSpectrum s{f.grid, std::vector<std::complex<double>>(nk(f.grid) * f.grid.ny)};
        fft::XTransform::get(f.grid.nx, f.grid.ny).forward(f.values.data(), s.coeff.data());
        double tail = 0.0;
        for (int k = 0; k <= f.grid.nx / 2; ++k)
            for (int j = 0; j < f.grid.ny; ++j) {
                const double a = std::abs(s.at(k, j));
                s.peak = std::max(s.peak, a);
                if (4 * k > f.grid.nx) tail = std::max(tail, a);
            }
        s.floor = std::max(kNoiseFloor * s.peak, kPlateauMargin * tail);
        return s;
    }

    // Weight in [0, 1]: 0 at or below the floor, 1 above twice the floor, a
    // cubic ramp between. A hard cut would flip coefficients sitting at the
    // threshold under rounding, and (i kappa)^m makes that visible.
    double keep(const std::complex<double>& c) const {
        const double f = floor;
        const double a = std::abs(c);
        if (a <= f) return 0.0;
        if (a >= 2.0 * f) return 1.0;
        const double t = a / f - 1.0;
        return t * t * (3.0 - 2.0 * t);
    }

    static size_t nk(const Grid2D& g) { return static_cast<size_t>(g.nx / 2 + 1); }
    std::complex<double>& at(int k, int iy) { return coeff[static_cast<size_t>(k) * grid.ny + iy]; }
    std::complex<double> at(int k, int iy) const {
        return coeff[static_cast<size_t>(k) * grid.ny + iy];
    }

    // Physical field of the m-th x-derivative: mode k times (i kappa)^m,
    // Nyquist dropped for m >= 1.
    Field derivative(int m) const {
        check_order(grid, m);
        std::vector<std::complex<double>> c(coeff);
        if (m > 0) {
            static const std::complex<double> ipow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
            const int nq = grid.nx / 2;
            for (int k = 0; k <= nq; ++k) {
                const std::complex<double> mult =
                    k == nq ? 0.0 : ipow[m % 4] * std::pow(grid.kappa(k), m);
                for (int j = 0; j < grid.ny; ++j) {
                    auto& z = c[static_cast<size_t>(k) * grid.ny + j];
                    z *= keep(z) * mult;
                }
            }
        }
        Field out(grid);
        fft::XTransform::get(grid.nx, grid.ny).backward(c.data(), out.values.data());
        out *= 1.0 / grid.nx;
        return out;
    }

    // Per-y values of (1/Lx-normalized) integral over x of |d_x^m f|^2 times Lx,
    // i.e. the x-integral of the squared m-th derivative at every y.
    YArray x_energy(int m) const {
        YArray e(grid.ny, 0.0);
        const int nq = grid.nx / 2;
        const double n2 = static_cast<double>(grid.nx) * grid.nx;
        for (int k = 0; k <= nq; ++k) {
            if (m > 0 && (k == 0 || k == nq)) continue;
            const double w = (k == 0 || k == nq ? 1.0 : 2.0) * std::pow(grid.kappa(k), 2 * m);
            for (int j = 0; j < grid.ny; ++j) {
                const double kp = m == 0 ? 1.0 : keep(at(k, j));
                e[j] += w * kp * kp * std::norm(at(k, j));
            }
        }
        for (double& v : e) v *= grid.lx / n2;
        return e;
    }

    static void check_order(const Grid2D& g, int m) {
        if (m < 0 || m > g.nx / 4)
            throw Error("grid", "x-derivative order " + std::to_string(m) +
                                    " exceeds the anti-aliasing guard Nx/4 = " +
                                    std::to_string(g.nx / 4));
    }
};

inline Field dx_m(const Field& f, int m) {
    XSpectrum::check_order(f.grid, m);
    if (m == 0) return f;
    return XSpectrum::of(f).derivative(m);
}

// ---------------------------------------------------------------- y stencils

// Fornberg's recursion: weights of the m-th derivative at z from nodes x.
inline std::vector<double> fd_weights(double z, const std::vector<double>& x, int m) {
    const int n = static_cast<int>(x.size());
    std::vector<std::vector<double>> c(n, std::vector<double>(m + 1, 0.0));
    double c1 = 1.0, c4 = x[0] - z;
    c[0][0] = 1.0;
    for (int i = 1; i < n; ++i) {
        const int mn = std::min(i, m);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = x[i] - z;
        for (int j = 0; j < i; ++j) {
            const double c3 = x[i] - x[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k)
                    c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for (int k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    std::vector<double> w(n);
    for (int i = 0; i < n; ++i) w[i] = c[i][m];
    return w;
}

// Unit-spacing stencils of the j-th derivative on ny nodes: fourth order
// centred in the interior; one-sided fourth order near the ends for j <= 3,
// third order for j = 4, 5.
struct YStencil {
    int j = 0;
    std::vector<int> start;
    std::vector<std::vector<double>> weights;

    static const YStencil& get(int ny, int j) {
        if (j < 1 || j > 5) throw Error("grid", "y-derivative order must be in 1..5");
        if (ny < j + 6) throw Error("grid", "Ny too small for the order-" + std::to_string(j) + " stencil");
        static std::map<std::pair<int, int>, YStencil> cache;
        static std::mutex mu;
        std::lock_guard lock(mu);
        auto it = cache.find({ny, j});
        if (it == cache.end()) it = cache.emplace(std::pair{ny, j}, build(ny, j)).first;
        return it->second;
    }

    static YStencil build(int ny, int j) {
        const int half = (j + 1) / 2 + 1;       // centred stencil is 2*half+1 points
        const int nb = j + (j <= 3 ? 4 : 3);    // one-sided stencil size
        YStencil s;
        s.j = j;
        s.start.resize(ny);
        s.weights.resize(ny);
        for (int i = 0; i < ny; ++i) {
            int lo, n;
            if (i - half >= 0 && i + half <= ny - 1) {
                lo = i - half;
                n = 2 * half + 1;
            } else {
                n = nb;
                lo = i < half ? 0 : ny - nb;
            }
            std::vector<double> nodes(n);
            for (int k = 0; k < n; ++k) nodes[k] = lo + k;
            s.start[i] = lo;
            s.weights[i] = fd_weights(static_cast<double>(i), nodes, j);
        }
        return s;
    }

    double apply(const double* col, int i, double h) const {
        const auto& w = weights[i];
        const double* p = col + start[i];
        double acc = 0.0;
        for (size_t k = 0; k < w.size(); ++k) acc += w[k] * p[k];
        return acc / std::pow(h, j);
    }
};

inline YArray dy_j(const YArray& col, double h, int j) {
    const auto& s = YStencil::get(static_cast<int>(col.size()), j);
    YArray out(col.size());
    for (size_t i = 0; i < col.size(); ++i) out[i] = s.apply(col.data(), static_cast<int>(i), h);
    return out;
}

inline Field dy_j(const Field& f, int j) {
    const auto& s = YStencil::get(f.grid.ny, j);
    const double h = f.grid.dy();
    Field out(f.grid);
    for (int ix = 0; ix < f.grid.nx; ++ix) {
        const double* in = f.row(ix);
        double* o = out.row(ix);
        for (int iy = 0; iy < f.grid.ny; ++iy) o[iy] = s.apply(in, iy, h);
    }
    return out;
}

// ---------------------------------------------------------------- quadrature

// Trapezoid weights in y with fourth-order Gregory end corrections.
inline const YArray& y_quadrature_weights(const Grid2D& g) {
    static std::map<std::pair<int, double>, YArray> cache;
    static std::mutex mu;
    std::lock_guard lock(mu);
    auto& w = cache[{g.ny, g.ymax}];
    if (w.empty()) {
        w.assign(g.ny, 1.0);
        const double end[3] = {3.0 / 8.0, 7.0 / 6.0, 23.0 / 24.0};
        for (int k = 0; k < 3; ++k) {
            w[k] = end[k];
            w[g.ny - 1 - k] = end[k];
        }
        for (double& v : w) v *= g.dy();
    }
    return w;
}

inline double weight_power(double y, double ell) { return std::pow(1.0 + y, ell); }

// Integral over y of w(y) * col(y) against the corrected trapezoid rule.
inline double integrate_y(const Grid2D& g, const YArray& col) {
    const auto& w = y_quadrature_weights(g);
    double acc = 0.0;
    for (int j = 0; j < g.ny; ++j) acc += w[j] * col[j];
    return acc;
}

// ( integral of (1+y)^{2 ell} f^2 dx dy )^{1/2}; the x-integral is the exact
// mean of the samples.
inline double weighted_l2(const Field& f, double ell) {
    const Grid2D& g = f.grid;
    YArray col(g.ny, 0.0);
    for (int ix = 0; ix < g.nx; ++ix) {
        const double* r = f.row(ix);
        for (int iy = 0; iy < g.ny; ++iy) col[iy] += r[iy] * r[iy];
    }
    for (int iy = 0; iy < g.ny; ++iy) col[iy] *= g.dx() * std::pow(1.0 + g.y(iy), 2.0 * ell);
    return std::sqrt(integrate_y(g, col));
}

// Same norm of d_x^m f evaluated mode by mode.
inline double weighted_l2_modes(const XSpectrum& s, int m, double ell) {
    YArray e = s.x_energy(m);
    for (int iy = 0; iy < s.grid.ny; ++iy) e[iy] *= std::pow(1.0 + s.grid.y(iy), 2.0 * ell);
    return std::sqrt(integrate_y(s.grid, e));
}

// Cumulative antiderivative in y, zero at y = 0. Each cell uses the cubic
// through the four nearest nodes (fourth order); the first and last cells use
// one-sided cubics.
inline void cumulative_y(const double* f, double* out, int n, double h) {
    out[0] = 0.0;
    const double c = h / 24.0;
    for (int i = 0; i < n - 1; ++i) {
        double cell;
        if (i == 0)
            cell = c * (9 * f[0] + 19 * f[1] - 5 * f[2] + f[3]);
        else if (i == n - 2)
            cell = c * (f[n - 4] - 5 * f[n - 3] + 19 * f[n - 2] + 9 * f[n - 1]);
        else
            cell = c * (-f[i - 1] + 13 * f[i] + 13 * f[i + 1] - f[i + 2]);
        out[i + 1] = out[i] + cell;
    }
}

inline Field integrate_y_from_zero(const Field& f) {
    Field out(f.grid);
    for (int ix = 0; ix < f.grid.nx; ++ix)
        cumulative_y(f.row(ix), out.row(ix), f.grid.ny, f.grid.dy());
    return out;
}

inline double linf(const Field& f) {
    double m = 0.0;
    for (double v : f.values) m = std::max(m, std::abs(v));
    return m;
}

inline double linf(const YArray& a) {
    double m = 0.0;
    for (double v : a) m = std::max(m, std::abs(v));
    return m;
}

// Value of f at y = 0 for every x.
inline std::vector<double> trace_y0(const Field& f) {
    std::vector<double> t(f.grid.nx);
    for (int ix = 0; ix < f.grid.nx; ++ix) t[ix] = f(ix, 0);
    return t;
}

// Largest |f(x, ymax)| relative to max |f|; the truncation validator warns when
// this exceeds 1e-8.
inline double truncation_ratio(const Field& f) {
    const double top = linf(f);
    if (top == 0.0) return 0.0;
    double edge = 0.0;
    for (int ix = 0; ix < f.grid.nx; ++ix) edge = std::max(edge, std::abs(f(ix, f.grid.ny - 1)));
    return edge / top;
}

} // namespace prandtl
