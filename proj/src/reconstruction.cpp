#include "kgnr/reconstruction.hpp"

#include <cmath>

namespace kgnr {

cplx carrier_phase(double c, double t) {
    const double ang = std::fmod(c * c * t, two_pi);
    return {std::cos(ang), std::sin(ang)};
}

Approximation reconstruct_first_order(const NLSPair& w, double c) {
    const cplx e = carrier_phase(c, w.t);
    Field z = 0.5 * e * w.u0 + 0.5 * std::conj(e) * conj(w.v0);
    return {std::move(z), ApproxOrder::first, w.t, c};
}

Field reconstruct_linear_correction(const NLSPair& w, const CorrectionState& corr, double lambda,
                                    double c) {
    const cplx e = carrier_phase(c, w.t);
    const cplx eb = std::conj(e);
    Field z1 = (lambda / 8.0) * (e * w.u0 + eb * conj(w.v0));
    z1 += 0.5 * (e * corr.xi1 + eb * conj(corr.eta1));
    return z1;
}

Approximation reconstruct_second_order_cubic(const Field& u0, const Field& xi1, double t, double c,
                                             double lambda) {
    const auto grid = u0.grid();
    const std::size_t n = grid->points();
    const cplx e1 = carrier_phase(c, t);
    const cplx e3 = carrier_phase(c, 3.0 * t);
    const double inv_c2 = 1.0 / (c * c);

    const auto uv = u0.values();
    const auto xv = xi1.values();
    std::vector<cplx> out(n);
    for (std::size_t j = 0; j < n; ++j) {
        const cplx u = uv[j];
        const double r2 = std::norm(u);
        const cplx osc1 = u * e1 + std::conj(u * e1);
        const cplx osc3 = u * u * u * e3 + std::conj(u * u * u * e3);
        const cplx oscx = xv[j] * e1 + std::conj(xv[j] * e1);
        out[j] = 0.5 * (1.0 + inv_c2 * (3.0 * lambda / 16.0) * r2) * osc1 -
                 (lambda / 64.0) * inv_c2 * osc3 + 0.5 * inv_c2 * oscx;
    }
    return {Field::from_values(grid, out), ApproxOrder::second, t, c};
}

}  // namespace kgnr
