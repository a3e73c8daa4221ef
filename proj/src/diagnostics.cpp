#include "kgnr/diagnostics.hpp"

#include <cmath>
#include <cstdio>

#include "kgnr/kernels.hpp"

namespace kgnr {

std::string to_csv_row(const QuantityReport& report) {
    char buf[192];
    std::snprintf(buf, sizeof buf, "%s,%.17g,%.17g,%.17g,%.17g", report.name.c_str(), report.t, report.c,
                  report.tau, report.value);
    return buf;
}

namespace {

double quadrature_weight(const SpectralGrid& grid) { return two_pi / static_cast<double>(grid.points()); }

// sum_j |v_j|^{2p+2} * (2 pi / n): the grid realization of the nonlinear
// energy integral.
double nonlinear_integral(const std::vector<cplx>& vals, const SpectralGrid& grid, int p) {
    std::vector<double> r(vals.size());
    kernels::active().abs2(r.data(), vals.data(), vals.size());
    double acc = 0.0;
    for (std::size_t j = 0; j < r.size(); ++j) {
        double term = r[j];
        for (int q = 0; q < p; ++q) term *= r[j];
        acc += term;
    }
    return acc * quadrature_weight(grid);
}

double coeff_abs2_sum(const Field& f, const std::vector<double>& w) {
    return kernels::active().weighted_abs2_sum(w.data(), f.coeffs().data(), w.size());
}

}  // namespace

double charge(const Field& z, const Field& zt, double c) {
    if (z.grid()->modes() != zt.grid()->modes()) throw shape_error("charge: mismatched grids");
    const auto zv = z.values();
    const auto ztv = zt.values();
    double acc = 0.0;
    for (std::size_t j = 0; j < zv.size(); ++j) {
        // Re(-i w) = Im(w)
        acc += std::imag(ztv[j] * std::conj(zv[j]));
    }
    return acc * quadrature_weight(*z.grid()) / (c * c);
}

double energy(const Field& z, const Field& zt, const KGParams& params) {
    params.validate();
    const auto& grid = *z.grid();
    const double c2 = params.c * params.c;
    const auto zv = z.values();
    const auto ztv = zt.values();
    const auto dzv = apply_symbol(z, symbols::gradient()).values();
    double quad = 0.0;
    for (std::size_t j = 0; j < zv.size(); ++j)
        quad += std::norm(ztv[j]) / c2 + std::norm(dzv[j]) + c2 * std::norm(zv[j]);
    quad *= quadrature_weight(grid);
    const double nl = params.lambda / (params.p + 1.0) * nonlinear_integral(zv, grid, params.p);
    return quad - nl;
}

double charge_uv(const FirstOrderState& state, double c) {
    const auto& grid = *state.u.grid();
    std::vector<double> w(grid.points());
    for (std::size_t m = 0; m < w.size(); ++m) {
        const double k = grid.mode_of(m);
        w[m] = std::sqrt(k * k + c * c) / c * (two_pi / 4.0);
    }
    return coeff_abs2_sum(state.u, w) - coeff_abs2_sum(state.v, w);
}

double energy_uv(const FirstOrderState& state, const KGParams& params) {
    params.validate();
    const auto& grid = *state.u.grid();
    const double c2 = params.c * params.c;
    const Field diff = state.u - conj(state.v);  // = -2 i c^{-1}<grad>_c^{-1} d_t z
    const Field sum = state.u + conj(state.v);   // = 2 z

    // Both quadratic parts reduce to the same per-mode weight:
    // |c^{-1} d_t z|^2 gives (1/4)(k^2+c^2)|diff_k|^2 and
    // |grad z|^2 + |c z|^2 gives (1/4)(k^2+c^2)|sum_k|^2.
    std::vector<double> w(grid.points());
    for (std::size_t m = 0; m < w.size(); ++m) {
        const double k = grid.mode_of(m);
        w[m] = (k * k + c2) * (two_pi / 4.0);
    }
    const double total_quad = coeff_abs2_sum(diff, w) + coeff_abs2_sum(sum, w);
    double total = total_quad;
    const auto zv = (0.5 * sum).values();
    total -= params.lambda / (params.p + 1.0) * nonlinear_integral(zv, *state.u.grid(), params.p);
    return total;
}

double limit_charge(const NLSPair& w) {
    std::vector<double> weights(w.u0.grid()->points(), two_pi / 4.0);
    return coeff_abs2_sum(w.u0, weights) - coeff_abs2_sum(w.v0, weights);
}

double limit_energy(const NLSPair& w, double t, double c, const KGParams& params) {
    const auto& grid = *w.u0.grid();
    std::vector<double> weights(grid.points());
    for (std::size_t m = 0; m < weights.size(); ++m) {
        const double k = grid.mode_of(m);
        weights[m] = k * k * (two_pi / 4.0);
    }
    double total = coeff_abs2_sum(w.u0, weights) + coeff_abs2_sum(w.v0, weights);

    const double ang = std::fmod(2.0 * c * c * t, two_pi);
    const cplx s(std::cos(ang), -std::sin(ang));  // e^{-2 i c^2 t}
    const auto uv = w.u0.values();
    const auto vv = w.v0.values();
    std::vector<cplx> zv(uv.size());
    for (std::size_t j = 0; j < zv.size(); ++j) zv[j] = 0.5 * (uv[j] + s * std::conj(vv[j]));
    total -= params.lambda / (params.p + 1.0) * nonlinear_integral(zv, grid, params.p);
    return total;
}

RestEnergySplit rest_energy_split(const FirstOrderState& state, double c, int truncation) {
    if (truncation < 0 || truncation > 1)
        throw parameter_error("rest-energy truncation order must be 0 or 1");
    const auto& grid = *state.u.grid();
    const double c2 = c * c;
    std::vector<double> w(grid.points());
    for (std::size_t m = 0; m < w.size(); ++m) {
        const double k = grid.mode_of(m);
        double symbol = 1.0;
        if (truncation >= 1) symbol += 0.5 * k * k / c2;
        w[m] = symbol * (two_pi / 4.0);
    }
    const double q_u = coeff_abs2_sum(state.u, w);
    const double q_v = -coeff_abs2_sum(state.v, w);
    return {q_u, q_v, 2.0 * c2 * (q_u - q_v)};
}

}  // namespace kgnr
