#include "kgnr/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "kgnr/kernels.hpp"

namespace kgnr {

namespace {

bool is_power_of_two(int v) { return v > 0 && (v & (v - 1)) == 0; }

void check_same_grid(const Field& a, const Field& b) {
    if (a.grid().get() != b.grid().get() && a.grid()->modes() != b.grid()->modes())
        throw shape_error("fields live on different grids");
}

}  // namespace

SpectralGrid::SpectralGrid(int num_modes) : K_(num_modes) {
    const std::size_t n = points();
    roots_.resize(n / 2);
    for (std::size_t j = 0; j < n / 2; ++j) {
        const double ang = two_pi * static_cast<double>(j) / static_cast<double>(n);
        roots_[j] = cplx(std::cos(ang), std::sin(ang));
    }
}

std::shared_ptr<const SpectralGrid> SpectralGrid::make(int num_modes) {
    if (num_modes < 2 || !is_power_of_two(num_modes))
        throw config_error("grid size K must be a power of two with K >= 2, got " + std::to_string(num_modes));
    return std::shared_ptr<const SpectralGrid>(new SpectralGrid(num_modes));
}

GridPtr make_grid(int num_modes) { return SpectralGrid::make(num_modes); }

double SpectralGrid::spacing() const { return two_pi / static_cast<double>(points()); }

double SpectralGrid::point(std::size_t j) const { return spacing() * static_cast<double>(j); }

std::vector<double> SpectralGrid::point_values() const {
    std::vector<double> xs(points());
    for (std::size_t j = 0; j < xs.size(); ++j) xs[j] = point(j);
    return xs;
}

// Iterative radix-2 transform; sign=+1 uses e^{+2*pi*i*jm/n}. Power-of-two
// sizes only, twiddles precomputed at grid construction.
void SpectralGrid::transform(cplx* a, int sign) const {
    const std::size_t n = points();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j |= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t half = len >> 1;
        const std::size_t step = n / len;
        for (std::size_t base = 0; base < n; base += len) {
            for (std::size_t k = 0; k < half; ++k) {
                const cplx root = roots_[k * step];
                const cplx w = sign > 0 ? root : std::conj(root);
                const cplx t = a[base + k + half] * w;
                a[base + k + half] = a[base + k] - t;
                a[base + k] += t;
            }
        }
    }
}

void SpectralGrid::forward(std::span<const cplx> values, std::span<cplx> coeffs) const {
    const std::size_t n = points();
    if (values.size() != n || coeffs.size() != n)
        throw shape_error("transform length mismatch: expected " + std::to_string(n));
    std::copy(values.begin(), values.end(), coeffs.begin());
    transform(coeffs.data(), -1);
    const double inv = 1.0 / static_cast<double>(n);
    kernels::active().cscale(coeffs.data(), coeffs.data(), cplx(inv, 0.0), n);
}

void SpectralGrid::inverse(std::span<const cplx> coeffs, std::span<cplx> values) const {
    const std::size_t n = points();
    if (values.size() != n || coeffs.size() != n)
        throw shape_error("transform length mismatch: expected " + std::to_string(n));
    std::copy(coeffs.begin(), coeffs.end(), values.begin());
    transform(values.data(), +1);
}

Field Field::zero(GridPtr grid) {
    std::vector<cplx> c(grid->points(), cplx(0.0));
    return Field(std::move(grid), std::move(c));
}

Field Field::from_coeffs(GridPtr grid, std::vector<cplx> coeffs) {
    if (coeffs.size() != grid->points()) throw shape_error("coefficient vector has wrong length");
    return Field(std::move(grid), std::move(coeffs));
}

Field Field::from_values(GridPtr grid, std::span<const cplx> values) {
    std::vector<cplx> c(grid->points());
    grid->forward(values, c);
    return Field(std::move(grid), std::move(c));
}

Field Field::from_values(GridPtr grid, const std::vector<double>& real_values) {
    std::vector<cplx> vals(real_values.size());
    for (std::size_t j = 0; j < vals.size(); ++j) vals[j] = cplx(real_values[j], 0.0);
    return from_values(std::move(grid), vals);
}

std::vector<cplx> Field::values() const {
    std::vector<cplx> v(grid_->points());
    grid_->inverse(coeffs_, v);
    return v;
}

Field& Field::operator+=(const Field& rhs) {
    check_same_grid(*this, rhs);
    kernels::active().caxpby(coeffs_.data(), cplx(1.0), coeffs_.data(), cplx(1.0), rhs.coeffs_.data(),
                             coeffs_.size());
    return *this;
}

Field& Field::operator-=(const Field& rhs) {
    check_same_grid(*this, rhs);
    kernels::active().caxpby(coeffs_.data(), cplx(1.0), coeffs_.data(), cplx(-1.0), rhs.coeffs_.data(),
                             coeffs_.size());
    return *this;
}

Field& Field::operator*=(cplx s) {
    kernels::active().cscale(coeffs_.data(), coeffs_.data(), s, coeffs_.size());
    return *this;
}

Field apply_symbol(const Field& f, const MultiplierSymbol& symbol) {
    const auto& grid = *f.grid();
    std::vector<cplx> table(grid.points());
    for (std::size_t m = 0; m < table.size(); ++m) table[m] = symbol.eval(grid.mode_of(m));
    std::vector<cplx> out(grid.points());
    kernels::active().cmul(out.data(), f.coeffs().data(), table.data(), out.size());
    return Field::from_coeffs(f.grid(), std::move(out));
}

Field conj(const Field& f) {
    const auto& grid = *f.grid();
    const std::size_t n = grid.points();
    const auto in = f.coeffs();
    std::vector<cplx> out(n);
    out[0] = std::conj(in[0]);
    // Mode -K is its own conjugate partner on this grid (K aliases to -K).
    const std::size_t half = n / 2;
    out[half] = std::conj(in[half]);
    for (std::size_t m = 1; m < n; ++m) {
        if (m == half) continue;
        out[m] = std::conj(in[n - m]);
    }
    return Field::from_coeffs(f.grid(), std::move(out));
}

Field pointwise_mul(const Field& a, const Field& b) {
    check_same_grid(a, b);
    auto va = a.values();
    const auto vb = b.values();
    kernels::active().cmul(va.data(), va.data(), vb.data(), va.size());
    return Field::from_values(a.grid(), va);
}

Field dealias_two_thirds(const Field& f) {
    const auto& grid = *f.grid();
    const int cutoff = (2 * grid.modes()) / 3;
    std::vector<cplx> out(f.coeffs().begin(), f.coeffs().end());
    for (std::size_t m = 0; m < out.size(); ++m)
        if (std::abs(grid.mode_of(m)) > cutoff) out[m] = cplx(0.0);
    return Field::from_coeffs(f.grid(), std::move(out));
}

Field apply_dealias(Field f, DealiasRule rule) {
    return rule == DealiasRule::none ? f : dealias_two_thirds(f);
}

namespace symbols {

MultiplierSymbol bracket(double c) {
    return {[c](int k) { return cplx(std::sqrt(static_cast<double>(k) * k + c * c), 0.0); }};
}

MultiplierSymbol bracket_inv_scaled(double c) {
    return {[c](int k) { return cplx(c / std::sqrt(static_cast<double>(k) * k + c * c), 0.0); }};
}

MultiplierSymbol laplacian() {
    return {[](int k) { return cplx(-static_cast<double>(k) * k, 0.0); }};
}

MultiplierSymbol bilaplacian() {
    return {[](int k) {
        const double k2 = static_cast<double>(k) * k;
        return cplx(k2 * k2, 0.0);
    }};
}

MultiplierSymbol gradient() {
    return {[](int k) { return cplx(0.0, static_cast<double>(k)); }};
}

MultiplierSymbol kg_phase(double c, double t) {
    return {[c, t](int k) { return kg_phase_symbol(k, c, t); }};
}

MultiplierSymbol half_laplace_flow(double t) {
    return {[t](int k) {
        const double ang = 0.5 * static_cast<double>(k) * k * t;
        return cplx(std::cos(ang), std::sin(ang));
    }};
}

}  // namespace symbols

cplx kg_phase_symbol(int k, double c, double t) {
    if (c <= 0.0) throw parameter_error("kg_phase_symbol requires c > 0");
    const double ang = t * c * std::sqrt(static_cast<double>(k) * k + c * c);
    return {std::cos(ang), std::sin(ang)};
}

double sobolev_norm(const Field& f, double s) {
    if (s < 0.0) throw parameter_error("sobolev_norm requires s >= 0");
    const auto& grid = *f.grid();
    std::vector<double> w(grid.points());
    for (std::size_t m = 0; m < w.size(); ++m)
        w[m] = std::pow(1.0 + std::abs(grid.mode_of(m)), 2.0 * s);
    return std::sqrt(kernels::active().weighted_abs2_sum(w.data(), f.coeffs().data(), w.size()));
}

double l2_norm(const Field& f) {
    std::vector<double> w(f.grid()->points(), two_pi);
    return std::sqrt(kernels::active().weighted_abs2_sum(w.data(), f.coeffs().data(), w.size()));
}

cplx torus_integral(std::span<const cplx> values, const SpectralGrid& grid) {
    if (values.size() != grid.points()) throw shape_error("value vector has wrong length");
    const cplx s = kernels::active().csum(values.data(), values.size());
    return s * (two_pi / static_cast<double>(grid.points()));
}

cplx torus_integral(const Field& f) {
    const auto v = f.values();
    return torus_integral(v, *f.grid());
}

}  // namespace kgnr
