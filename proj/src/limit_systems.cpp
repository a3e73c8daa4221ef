#include "kgnr/limit_systems.hpp"

#include <cmath>
#include <string>

#include "kgnr/kernels.hpp"

namespace kgnr {

namespace {

constexpr cplx I{0.0, 1.0};

double binom(int n, int k) {
    double r = 1.0;
    for (int j = 0; j < k; ++j) r *= static_cast<double>(n - j) / (j + 1);
    return r;
}

// The potential part of the averaged system acts as a real pointwise gain:
// the u0 right-hand side is V_p(|u0|^2, |v0|^2) u0 with
//   V_p(r, s) = lambda 2^{-(2p+1)} sum_j C(p+1, j) C(p, j) r^{p-j} s^j,
// obtained by averaging the fast phase out of the polynomial nonlinearity.
std::vector<double> potential_gain_coeffs(double lambda, int p) {
    std::vector<double> coeffs(p + 1);
    const double scale = lambda * std::pow(0.5, 2 * p + 1);
    for (int j = 0; j <= p; ++j) coeffs[j] = scale * binom(p + 1, j) * binom(p, j);
    return coeffs;
}

double potential_gain(const std::vector<double>& coeffs, double r, double s) {
    const int p = static_cast<int>(coeffs.size()) - 1;
    double acc = 0.0;
    for (int j = 0; j <= p; ++j) {
        double term = coeffs[j];
        for (int q = 0; q < p - j; ++q) term *= r;
        for (int q = 0; q < j; ++q) term *= s;
        acc += term;
    }
    return acc;
}

void check_pair(const NLSPair& w) {
    if (w.u0.grid()->modes() != w.v0.grid()->modes()) throw shape_error("pair components on different grids");
}

}  // namespace

NLSPair nls_initial(const InitialData& data) {
    auto [first, second] = psi_expansion_term(0, data);
    return {std::move(first), std::move(second), 0.0};
}

std::pair<Field, Field> averaged_nonlinearity(const NLSPair& w, double lambda, int p, int nodes) {
    check_pair(w);
    if (nodes < 2 * p + 2)
        throw config_error("fast-phase average needs at least 2p+2 = " + std::to_string(2 * p + 2) +
                           " nodes, got " + std::to_string(nodes));
    const auto grid = w.u0.grid();
    const std::size_t n = grid->points();
    const auto uv = w.u0.values();
    const auto vv = w.v0.values();

    std::vector<cplx> acc1(n, cplx(0.0)), acc2(n, cplx(0.0));
    std::vector<cplx> z1(n), z2(n);
    auto& kr = kernels::active();
    std::vector<double> gain(n);

    auto accumulate = [&](std::vector<cplx>& z, std::vector<cplx>& acc) {
        if (p == 0) {
            kr.caxpby(acc.data(), cplx(1.0), acc.data(), cplx(lambda), z.data(), n);
            return;
        }
        kr.abs2(gain.data(), z.data(), n);
        for (std::size_t j = 0; j < n; ++j) {
            double g = gain[j];
            for (int q = 1; q < p; ++q) g *= gain[j];
            gain[j] = lambda * g;
        }
        kr.rmul(z.data(), z.data(), gain.data(), n);
        kr.caxpby(acc.data(), cplx(1.0), acc.data(), cplx(1.0), z.data(), n);
    };

    // The integrand has period pi in theta; nodes at pi*m/M cover the phase
    // circle e^{-2 i theta} exactly once.
    const double pi = two_pi / 2.0;
    for (int m = 0; m < nodes; ++m) {
        const double theta = pi * static_cast<double>(m) / nodes;
        const cplx a = cplx(std::cos(2.0 * theta), -std::sin(2.0 * theta));
        for (std::size_t j = 0; j < n; ++j) {
            z1[j] = 0.5 * (uv[j] + a * std::conj(vv[j]));
            z2[j] = 0.5 * (vv[j] + a * std::conj(uv[j]));
        }
        accumulate(z1, acc1);
        accumulate(z2, acc2);
    }
    const cplx inv = cplx(1.0 / nodes);
    kr.cscale(acc1.data(), acc1.data(), inv, n);
    kr.cscale(acc2.data(), acc2.data(), inv, n);
    return {Field::from_values(grid, acc1), Field::from_values(grid, acc2)};
}

NLSPair kinetic_step(const NLSPair& w, double tau) {
    const auto flow = symbols::half_laplace_flow(tau);
    return {apply_symbol(w.u0, flow), apply_symbol(w.v0, flow), w.t + tau};
}

NLSPair potential_step(const NLSPair& w, double lambda, int p, double tau) {
    check_pair(w);
    if (p < 0) throw parameter_error("nonlinearity degree p must be nonnegative");
    const auto grid = w.u0.grid();
    const std::size_t n = grid->points();
    auto uv = w.u0.values();
    auto vv = w.v0.values();
    std::vector<double> ru(n), rv(n);
    auto& kr = kernels::active();
    kr.abs2(ru.data(), uv.data(), n);
    kr.abs2(rv.data(), vv.data(), n);
    const auto coeffs = potential_gain_coeffs(lambda, p);
    for (std::size_t j = 0; j < n; ++j) {
        const double au = -tau * potential_gain(coeffs, ru[j], rv[j]);
        const double av = -tau * potential_gain(coeffs, rv[j], ru[j]);
        uv[j] *= cplx(std::cos(au), std::sin(au));
        vv[j] *= cplx(std::cos(av), std::sin(av));
    }
    return {Field::from_values(grid, uv), Field::from_values(grid, vv), w.t + tau};
}

NLSPair strang_step(const NLSPair& w, double lambda, int p, double tau) {
    NLSPair half = potential_step(w, lambda, p, 0.5 * tau);
    half.t = w.t;
    NLSPair kin = kinetic_step(half, tau);
    NLSPair out = potential_step(kin, lambda, p, 0.5 * tau);
    out.t = w.t + tau;
    return out;
}

LimitTrajectory solve_nls(const NLSPair& w0, double lambda, int p, const SplittingConfig& config, double T,
                          std::size_t store_stride) {
    if (!(T > 0.0)) throw parameter_error("final time T must be positive");
    if (!(config.tau > 0.0)) throw parameter_error("step tau must be positive");
    const auto steps = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(T / config.tau)));
    const double tau = T / static_cast<double>(steps);

    LimitTrajectory out;
    out.tau = tau;
    out.states.reserve(store_stride ? steps / store_stride + 2 : 2);
    NLSPair w = w0;
    w.t = 0.0;
    out.states.push_back(w);
    for (std::size_t s = 0; s < steps; ++s) {
        w = strang_step(w, lambda, p, tau);
        w.t = tau * static_cast<double>(s + 1);  // avoid accumulated drift in the stamp
        const bool last = s + 1 == steps;
        if (last || (store_stride != 0 && (s + 1) % store_stride == 0)) out.states.push_back(w);
    }
    return out;
}

NLSPair linear_limit_exact(const InitialData& data, double lambda, double t) {
    NLSPair w = nls_initial(data);
    MultiplierSymbol flow{[lambda, t](int k) {
        const double ang = 0.5 * (static_cast<double>(k) * k - lambda) * t;
        return cplx(std::cos(ang), std::sin(ang));
    }};
    return {apply_symbol(w.u0, flow), apply_symbol(w.v0, flow), t};
}

CorrectionState linear_correction_exact(const InitialData& data, double lambda, double t) {
    const NLSPair w0 = nls_initial(data);
    const auto lap = symbols::laplacian();

    // xi1(0) = (Laplace u0(0) - (Laplace + lambda) conj v0(0)) / 4 and the
    // mirrored expression for eta1(0).
    auto initial = [&](const Field& a, const Field& b) {
        return 0.25 * (apply_symbol(a, lap) - apply_symbol(b, lap) - cplx(lambda) * b);
    };
    const Field xi0 = initial(w0.u0, conj(w0.v0));
    const Field eta0 = initial(w0.v0, conj(w0.u0));

    // Per mode: xi(t) = e^{i w t} (xi(0) - i t ((a^2-lambda)^2/8) u0_a(0)),
    // w = (a^2 - lambda)/2. The t-proportional part is the resonant response
    // to the forcing (1/2) d_tt u0.
    const auto& grid = *data.phi.grid();
    auto evolve = [&](const Field& init, const Field& source) {
        std::vector<cplx> out(grid.points());
        const auto ic = init.coeffs();
        const auto sc = source.coeffs();
        for (std::size_t m = 0; m < out.size(); ++m) {
            const double a2l = static_cast<double>(grid.mode_of(m)) * grid.mode_of(m) - lambda;
            const double ang = 0.5 * a2l * t;
            const cplx phase(std::cos(ang), std::sin(ang));
            out[m] = phase * (ic[m] - I * (t * a2l * a2l / 8.0) * sc[m]);
        }
        return Field::from_coeffs(data.phi.grid(), std::move(out));
    };
    return {evolve(xi0, w0.u0), evolve(eta0, w0.v0), t};
}

Field linear_z1_closed_form(const InitialData& data, double lambda, double c, double t) {
    const auto& grid = *data.phi.grid();
    std::vector<cplx> out(grid.points());
    const auto phi = data.phi.coeffs();
    const auto gam = data.gamma.coeffs();
    for (std::size_t m = 0; m < out.size(); ++m) {
        const double a2l = static_cast<double>(grid.mode_of(m)) * grid.mode_of(m) - lambda;
        const double omega = c * c + 0.5 * a2l;
        const double secular = a2l * a2l * t / 8.0;
        const double s = std::sin(omega * t), co = std::cos(omega * t);
        out[m] = phi[m] * (secular * s) + gam[m] * (-0.5 * a2l * s - secular * co);
    }
    return Field::from_coeffs(data.phi.grid(), std::move(out));
}

Field correction_forcing(const Field& u0, double lambda, G0Variant variant) {
    const double coupling = variant == G0Variant::coeff_3_16 ? 3.0 / 16.0 : 3.0 / 32.0;
    const auto grid = u0.grid();
    const std::size_t n = grid->points();

    Field out = apply_symbol(u0, symbols::bilaplacian()) * cplx(0.125);

    auto uv = u0.values();
    std::vector<double> r(n);
    auto& kr = kernels::active();
    kr.abs2(r.data(), uv.data(), n);

    // |u0|^2 u0 (for the Laplacian coupling term)
    std::vector<cplx> cubic(n);
    kr.rmul(cubic.data(), uv.data(), r.data(), n);
    out += apply_symbol(Field::from_values(grid, cubic), symbols::laplacian()) * cplx(coupling * lambda);

    // (51/256) lambda^2 |u0|^4 u0
    for (std::size_t j = 0; j < n; ++j) r[j] *= r[j];
    kr.rmul(cubic.data(), uv.data(), r.data(), n);
    out += Field::from_values(grid, cubic) * cplx(51.0 / 256.0 * lambda * lambda);
    return out;
}

Field cubic_correction_initial(const Field& u0_initial, double lambda) {
    const auto grid = u0_initial.grid();
    const std::size_t n = grid->points();
    const auto uv = u0_initial.values();
    std::vector<cplx> vals(n);
    for (std::size_t j = 0; j < n; ++j) {
        const cplx u = uv[j];
        const cplx ub = std::conj(u);
        vals[j] = (lambda / 16.0) * u * u * u - (lambda / 32.0) * ub * ub * ub -
                  (3.0 * lambda / 16.0) * (u * ub) * ub;
    }
    Field out = Field::from_values(grid, vals);
    out += apply_symbol(u0_initial - conj(u0_initial), symbols::laplacian()) * cplx(0.25);
    return out;
}

Mat2 exp_traceless(const Mat2& m) {
    // For traceless A, A^2 = (a^2 + bc) I, so exp(A) closes in {I, A}.
    const double mu2 = m.m00 * m.m00 + m.m01 * m.m10;
    double ch, shc;  // exp(A) = ch*I + shc*A
    if (mu2 > 1e-12) {
        const double mu = std::sqrt(mu2);
        ch = std::cosh(mu);
        shc = std::sinh(mu) / mu;
    } else if (mu2 < -1e-12) {
        const double s = std::sqrt(-mu2);
        ch = std::cos(s);
        shc = std::sin(s) / s;
    } else {
        ch = 1.0 + 0.5 * mu2;
        shc = 1.0 + mu2 / 6.0;
    }
    return {ch + shc * m.m00, shc * m.m01, shc * m.m10, ch + shc * m.m11};
}

namespace {

// A(u0) of the linearized potential equation in real coordinates
// (alpha, beta) = (Re xi, Im xi), with u0 = a0 + i b0:
//   A = (3 lambda / 8) [[ 2 a0 b0,        a0^2 + 3 b0^2 ],
//                       [ -(3 a0^2+b0^2), -2 a0 b0      ]].
inline Mat2 potential_matrix(double lambda, cplx u0) {
    const double s = 3.0 * lambda / 8.0;
    const double a0 = u0.real(), b0 = u0.imag();
    return {s * 2.0 * a0 * b0, s * (a0 * a0 + 3.0 * b0 * b0), -s * (3.0 * a0 * a0 + b0 * b0),
            -s * 2.0 * a0 * b0};
}

}  // namespace

Field potential_step_exp_trapezoid(const Field& xi, const Field& u0_begin, const Field& u0_end,
                                   double lambda, double tau, G0Variant variant) {
    const auto grid = xi.grid();
    const std::size_t n = grid->points();
    const auto xv = xi.values();
    const auto ub = u0_begin.values();
    const auto ue = u0_end.values();
    const auto gb = correction_forcing(u0_begin, lambda, variant).values();
    const auto ge = correction_forcing(u0_end, lambda, variant).values();

    std::vector<cplx> out(n);
    for (std::size_t j = 0; j < n; ++j) {
        const Mat2 a0 = potential_matrix(lambda, ub[j]);
        const Mat2 a1 = potential_matrix(lambda, ue[j]);
        const Mat2 e = exp_traceless({0.5 * tau * (a0.m00 + a1.m00), 0.5 * tau * (a0.m01 + a1.m01),
                                      0.5 * tau * (a0.m10 + a1.m10), 0.5 * tau * (a0.m11 + a1.m11)});
        const double y0 = xv[j].real() + 0.5 * tau * gb[j].imag();
        const double y1 = xv[j].imag() - 0.5 * tau * gb[j].real();
        const double alpha = e.m00 * y0 + e.m01 * y1 + 0.5 * tau * ge[j].imag();
        const double beta = e.m10 * y0 + e.m11 * y1 - 0.5 * tau * ge[j].real();
        out[j] = cplx(alpha, beta);
    }
    return Field::from_values(grid, out);
}

CorrectionTrajectory solve_correction_cubic(const LimitTrajectory& limit, const InitialData& data,
                                            double lambda, G0Variant variant, std::size_t store_stride) {
    if (limit.states.size() < 2) throw config_error("limit trajectory must contain every step endpoint");
    const double tau = limit.tau;
    for (std::size_t s = 1; s < limit.states.size(); ++s) {
        const double dt = limit.states[s].t - limit.states[s - 1].t;
        if (std::abs(dt - tau) > 1e-12 * std::max(1.0, std::abs(tau)))
            throw config_error("limit trajectory is not sampled at every step endpoint");
    }
    // The second-order cubic expansion is constructed for real data (u0 = v0).
    const double scale = std::max({1.0, sobolev_norm(data.phi, 0.0), sobolev_norm(data.gamma, 0.0)});
    if (sobolev_norm(data.phi - conj(data.phi), 0.0) > 1e-11 * scale ||
        sobolev_norm(data.gamma - conj(data.gamma), 0.0) > 1e-11 * scale)
        throw parameter_error("cubic correction path requires real initial data (u0 = v0)");

    CorrectionTrajectory out;
    out.tau = tau;
    Field xi = cubic_correction_initial(limit.states.front().u0, lambda);
    out.states.push_back({xi, xi, 0.0});
    const auto half_kinetic = symbols::half_laplace_flow(0.5 * tau);
    const std::size_t steps = limit.states.size() - 1;
    for (std::size_t s = 0; s < steps; ++s) {
        xi = apply_symbol(xi, half_kinetic);
        xi = potential_step_exp_trapezoid(xi, limit.states[s].u0, limit.states[s + 1].u0, lambda, tau,
                                          variant);
        xi = apply_symbol(xi, half_kinetic);
        const bool last = s + 1 == steps;
        if (last || (store_stride != 0 && (s + 1) % store_stride == 0))
            out.states.push_back({xi, xi, limit.states[s + 1].t});
    }
    return out;
}

}  // namespace kgnr
