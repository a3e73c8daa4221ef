#pragma once

#include <complex>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "kgnr/errors.hpp"

// One-dimensional Fourier pseudo-spectral foundation on the 2*pi torus:
// grids, transforms, diagonal (Fourier multiplier) operators, norms and
// quadrature. Fields store Fourier coefficients canonically; grid values are
// a derived view. Everything here is an immutable value after construction,
// so concurrent use from multiple threads needs no coordination.

namespace kgnr {

using cplx = std::complex<double>;

inline constexpr double two_pi = 6.283185307179586476925286766559;

// Equispaced periodic grid with 2K points on [0, 2*pi) and mode set
// {-K, ..., K-1}. K must be a power of two (transform efficiency only).
class SpectralGrid {
public:
    static std::shared_ptr<const SpectralGrid> make(int num_modes);

    int modes() const { return K_; }                  // K
    std::size_t points() const { return 2 * static_cast<std::size_t>(K_); }
    double spacing() const;                           // pi/K
    double mesh() const { return 1.0 / K_; }          // h = 1/K
    double point(std::size_t j) const;                // x_j
    std::vector<double> point_values() const;

    // Storage slot m <-> integer mode k (FFT wrap-around order).
    int mode_of(std::size_t m) const {
        const int mi = static_cast<int>(m);
        return mi < K_ ? mi : mi - 2 * K_;
    }
    std::size_t index_of(int k) const {
        return static_cast<std::size_t>(k >= 0 ? k : k + 2 * K_);
    }

    // coeffs[m] = (1/2K) sum_j values[j] e^{-i k_m x_j}
    void forward(std::span<const cplx> values, std::span<cplx> coeffs) const;
    // values[j] = sum_m coeffs[m] e^{+i k_m x_j}
    void inverse(std::span<const cplx> coeffs, std::span<cplx> values) const;

private:
    explicit SpectralGrid(int num_modes);
    void transform(cplx* data, int sign) const;  // unnormalized DFT, e^{sign*2*pi*i*jm/n}

    int K_;
    std::vector<cplx> roots_;  // e^{+2*pi*i*j/n}, j in [0, n/2)
};

using GridPtr = std::shared_ptr<const SpectralGrid>;

GridPtr make_grid(int num_modes);

// Complex periodic function, canonically stored as Fourier coefficients.
class Field {
public:
    static Field zero(GridPtr grid);
    static Field from_coeffs(GridPtr grid, std::vector<cplx> coeffs);
    static Field from_values(GridPtr grid, std::span<const cplx> values);
    static Field from_values(GridPtr grid, const std::vector<double>& real_values);

    template <typename F>
    static Field from_function(GridPtr grid, F&& f) {
        std::vector<cplx> vals(grid->points());
        for (std::size_t j = 0; j < vals.size(); ++j) vals[j] = cplx(f(grid->point(j)));
        return from_values(std::move(grid), vals);
    }

    const GridPtr& grid() const { return grid_; }
    std::span<const cplx> coeffs() const { return coeffs_; }
    cplx coeff(int k) const { return coeffs_[grid_->index_of(k)]; }
    std::vector<cplx> values() const;

    Field& operator+=(const Field& rhs);
    Field& operator-=(const Field& rhs);
    Field& operator*=(cplx s);
    friend Field operator+(Field lhs, const Field& rhs) { return lhs += rhs; }
    friend Field operator-(Field lhs, const Field& rhs) { return lhs -= rhs; }
    friend Field operator*(cplx s, Field f) { return f *= s; }
    friend Field operator*(Field f, cplx s) { return f *= s; }

private:
    Field(GridPtr grid, std::vector<cplx> coeffs) : grid_(std::move(grid)), coeffs_(std::move(coeffs)) {}

    GridPtr grid_;
    std::vector<cplx> coeffs_;
};

// Diagonal operator in Fourier: scales coefficient k by eval(k).
struct MultiplierSymbol {
    std::function<cplx(int)> eval;
};

Field apply_symbol(const Field& f, const MultiplierSymbol& symbol);

// Complex conjugate of the function (coefficient k picks up conj of -k).
Field conj(const Field& f);

// Pointwise product of the two functions on the grid (aliased, no padding).
Field pointwise_mul(const Field& a, const Field& b);

// Optional dealiasing for pseudo-spectral products. Off by default
// everywhere; aliasing error is part of the spatial discretization error.
enum class DealiasRule { none, two_thirds };

// Zero every mode with |k| > floor(2K/3).
Field dealias_two_thirds(const Field& f);
Field apply_dealias(Field f, DealiasRule rule);

namespace symbols {

// sqrt(-Laplace + c^2)
MultiplierSymbol bracket(double c);
// c * bracket(c)^{-1} = c / sqrt(k^2 + c^2); uniformly bounded by 1
MultiplierSymbol bracket_inv_scaled(double c);
MultiplierSymbol laplacian();        // -k^2
MultiplierSymbol bilaplacian();      // +k^4
MultiplierSymbol gradient();         // i k
// e^{i t c sqrt(k^2 + c^2)}: the free Klein-Gordon flow, an isometry
MultiplierSymbol kg_phase(double c, double t);
// e^{i k^2 t / 2}: exact flow of i d_t u = (1/2) Laplace u
MultiplierSymbol half_laplace_flow(double t);

}  // namespace symbols

// The scalar multiplier of the free flow at one mode, |result| = 1.
cplx kg_phase_symbol(int k, double c, double t);

// sqrt(sum_k (1+|k|)^{2s} |coeff_k|^2); s = 0 gives the coefficient norm.
double sobolev_norm(const Field& f, double s);

// True L^2(T) norm: sqrt(2*pi * sum |coeff_k|^2).
double l2_norm(const Field& f);

// (2*pi/2K) * sum_j values_j; exact for trigonometric polynomials of
// degree < 2K.
cplx torus_integral(std::span<const cplx> values, const SpectralGrid& grid);
cplx torus_integral(const Field& f);

}  // namespace kgnr
