#include "kgnr/kg_model.hpp"

#include <cmath>
#include <string>

#include "kgnr/kernels.hpp"

namespace kgnr {

namespace {
constexpr cplx I{0.0, 1.0};
}

void KGParams::validate() const {
    if (!(c > 0.0)) throw parameter_error("speed-of-light parameter must be positive");
    if (p < 0) throw parameter_error("nonlinearity degree p must be nonnegative");
}

FirstOrderState to_first_order(const Field& z, const Field& zt, double c) {
    if (z.grid()->modes() != zt.grid()->modes()) throw shape_error("z and d_t z live on different grids");
    if (!(c > 0.0)) throw parameter_error("c must be positive");
    // c^{-1}<grad>_c^{-1} = c^{-2} * (c <grad>_c^{-1})
    const auto smooth = symbols::bracket_inv_scaled(c);
    const cplx factor = -I / (c * c);
    Field u = z + factor * apply_symbol(zt, smooth);
    Field v = conj(z) + factor * apply_symbol(conj(zt), smooth);
    return {std::move(u), std::move(v), 0.0};
}

Field from_first_order(const FirstOrderState& state) {
    return 0.5 * (state.u + conj(state.v));
}

FirstOrderState first_order_initial(const InitialData& data, double c) {
    if (!(c > 0.0)) throw parameter_error("c must be positive");
    const auto smooth = symbols::bracket_inv_scaled(c);
    Field u = data.phi - I * apply_symbol(data.gamma, smooth);
    Field v = conj(data.phi) - I * apply_symbol(conj(data.gamma), smooth);
    return {std::move(u), std::move(v), 0.0};
}

Field nonlinearity(const Field& z, double lambda, int p, DealiasRule dealias) {
    if (p < 0) throw parameter_error("nonlinearity degree p must be nonnegative");
    if (p == 0) return cplx(lambda) * z;
    auto vals = z.values();
    const std::size_t n = vals.size();
    std::vector<double> gain(n);
    kernels::active().abs2(gain.data(), vals.data(), n);
    for (std::size_t j = 0; j < n; ++j) {
        double g = gain[j];
        for (int q = 1; q < p; ++q) g *= gain[j];
        gain[j] = lambda * g;
    }
    kernels::active().rmul(vals.data(), vals.data(), gain.data(), n);
    return apply_dealias(Field::from_values(z.grid(), vals), dealias);
}

std::pair<Field, Field> nonlinear_pair(const FirstOrderState& state, double lambda, int p) {
    const Field z = from_first_order(state);
    Field first = nonlinearity(z, lambda, p);
    Field second = conj(first);  // f real: f(conj z) = conj(f(z))
    return {std::move(first), std::move(second)};
}

std::pair<Field, Field> psi_expansion_term(int n, const InitialData& data) {
    switch (n) {
        case 0:
            return {data.phi - I * data.gamma, conj(data.phi) - I * conj(data.gamma)};
        case 1: {
            const cplx half_i = cplx(0.0, -0.5);
            const auto lap = symbols::laplacian();
            return {half_i * apply_symbol(data.gamma, lap), half_i * apply_symbol(conj(data.gamma), lap)};
        }
        default:
            throw parameter_error("initial-data expansion term implemented for n in {0, 1}, got " +
                                  std::to_string(n));
    }
}

double series_coefficient(SeriesKind kind, int n) {
    if (n < 0) throw parameter_error("series coefficient index must be nonnegative");
    const double a = kind == SeriesKind::sqrt ? 0.5 : -0.5;
    double coeff = 1.0;
    for (int j = 0; j < n; ++j) coeff *= (a - j) / (j + 1);
    return coeff;
}

namespace {

// Per-mode frequency data of the linear flow; throws on a degenerate mode.
double linear_mode_frequency(int a, const KGParams& params) {
    const double w2 = static_cast<double>(a) * a + params.c * params.c - params.lambda;
    if (!(w2 > 0.0))
        throw parameter_error("degenerate frequency: a^2 + c^2 - lambda <= 0 at mode " + std::to_string(a));
    return std::sqrt(w2);
}

}  // namespace

Field exact_linear_solution(const InitialData& data, const KGParams& params, double t) {
    params.validate();
    if (params.p != 0) throw parameter_error("exact linear solution requires p = 0");
    const auto& grid = *data.phi.grid();
    std::vector<cplx> out(grid.points());
    const auto phi = data.phi.coeffs();
    const auto gam = data.gamma.coeffs();
    for (std::size_t m = 0; m < out.size(); ++m) {
        const int a = grid.mode_of(m);
        const double w = linear_mode_frequency(a, params);
        const double ang = params.c * t * w;
        out[m] = phi[m] * std::cos(ang) + (params.c / w) * gam[m] * std::sin(ang);
    }
    return Field::from_coeffs(data.phi.grid(), std::move(out));
}

Field exact_linear_time_derivative(const InitialData& data, const KGParams& params, double t) {
    params.validate();
    if (params.p != 0) throw parameter_error("exact linear solution requires p = 0");
    const auto& grid = *data.phi.grid();
    std::vector<cplx> out(grid.points());
    const auto phi = data.phi.coeffs();
    const auto gam = data.gamma.coeffs();
    for (std::size_t m = 0; m < out.size(); ++m) {
        const int a = grid.mode_of(m);
        const double w = linear_mode_frequency(a, params);
        const double ang = params.c * t * w;
        out[m] = -params.c * w * phi[m] * std::sin(ang) + params.c * params.c * gam[m] * std::cos(ang);
    }
    return Field::from_coeffs(data.phi.grid(), std::move(out));
}

namespace {

// Workspace for the twisted-variable RK4 scheme. All arrays are in
// coefficient space; one nonlinearity evaluation costs two transforms.
class ReferenceScheme {
public:
    ReferenceScheme(GridPtr grid, const KGParams& params)
        : grid_(std::move(grid)),
          params_(params),
          n_(grid_->points()),
          freq_(n_),
          smooth_(n_),
          phase_(n_),
          cached_phase_t_(std::nan("")),
          zc_(n_), zv_(n_), fv_(n_), fc_(n_), uc_(n_), vc_(n_) {
        for (std::size_t m = 0; m < n_; ++m) {
            const double k = grid_->mode_of(m);
            freq_[m] = params.c * std::sqrt(k * k + params.c * params.c);
            smooth_[m] = params.c / std::sqrt(k * k + params.c * params.c);
        }
    }

    // d/dt (u~, v~) at time t; in/out arrays of length n each.
    void rhs(double t, const cplx* ut, const cplx* vt, cplx* du, cplx* dv) {
        update_phase(t);
        auto& kr = kernels::active();
        kr.cmul(uc_.data(), ut, phase_.data(), n_);
        kr.cmul(vc_.data(), vt, phase_.data(), n_);
        // z = (u + conj v)/2 in coefficient space
        conj_flip(vc_.data(), zc_.data());
        kr.caxpby(zc_.data(), cplx(0.5), uc_.data(), cplx(0.5), zc_.data(), n_);
        grid_->inverse(zc_, zv_);
        pointwise_nonlinearity();
        grid_->forward(fv_, fc_);
        // du = -i e^{-i t c<grad>} (c<grad>^{-1}) f_hat, dv likewise with the
        // conjugate-flipped coefficients.
        conj_flip(fc_.data(), zc_.data());
        for (std::size_t m = 0; m < n_; ++m) {
            const cplx twist = cplx(0.0, -1.0) * smooth_[m] * std::conj(phase_[m]);
            du[m] = twist * fc_[m];
            dv[m] = twist * zc_[m];
        }
    }

    void untwist(double t, const cplx* ut, const cplx* vt, cplx* u, cplx* v) {
        update_phase(t);
        kernels::active().cmul(u, ut, phase_.data(), n_);
        kernels::active().cmul(v, vt, phase_.data(), n_);
    }

private:
    void update_phase(double t) {
        if (t == cached_phase_t_) return;
        for (std::size_t m = 0; m < n_; ++m) {
            const double ang = t * freq_[m];
            phase_[m] = cplx(std::cos(ang), std::sin(ang));
        }
        cached_phase_t_ = t;
    }

    void conj_flip(const cplx* in, cplx* out) const {
        out[0] = std::conj(in[0]);
        const std::size_t half = n_ / 2;
        out[half] = std::conj(in[half]);
        for (std::size_t m = 1; m < n_; ++m) {
            if (m == half) continue;
            out[m] = std::conj(in[n_ - m]);
        }
    }

    void pointwise_nonlinearity() {
        const int p = params_.p;
        const double lambda = params_.lambda;
        if (p == 0) {
            kernels::active().cscale(fv_.data(), zv_.data(), cplx(lambda), n_);
            return;
        }
        gain_.resize(n_);
        kernels::active().abs2(gain_.data(), zv_.data(), n_);
        for (std::size_t j = 0; j < n_; ++j) {
            double g = gain_[j];
            for (int q = 1; q < p; ++q) g *= gain_[j];
            gain_[j] = lambda * g;
        }
        kernels::active().rmul(fv_.data(), zv_.data(), gain_.data(), n_);
    }

    GridPtr grid_;
    KGParams params_;
    std::size_t n_;
    std::vector<double> freq_;
    std::vector<double> smooth_;
    std::vector<cplx> phase_;
    double cached_phase_t_;
    std::vector<cplx> zc_, zv_, fv_, fc_, uc_, vc_;
    std::vector<double> gain_;
};

}  // namespace

std::vector<FirstOrderState> integrate_reference(const FirstOrderState& psi, const KGParams& params,
                                                 const ReferenceOptions& options) {
    params.validate();
    if (!(options.T > 0.0)) throw parameter_error("final time T must be positive");
    if (!(options.tau > 0.0)) throw parameter_error("reference step must be positive");
    if (options.tau * params.c * params.c > 0.1 + 1e-12)
        throw guard_violation("reference step too coarse: tau * c^2 = " +
                              std::to_string(options.tau * params.c * params.c) +
                              " exceeds 0.1; the oscillatory phase would be under-resolved");
    if (psi.u.grid()->modes() != psi.v.grid()->modes()) throw shape_error("state components on different grids");

    const GridPtr grid = psi.u.grid();
    const std::size_t n = grid->points();
    const std::size_t steps = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(options.T / options.tau)));
    const double tau = options.T / static_cast<double>(steps);

    ReferenceScheme scheme(grid, params);

    std::vector<cplx> ut(psi.u.coeffs().begin(), psi.u.coeffs().end());
    std::vector<cplx> vt(psi.v.coeffs().begin(), psi.v.coeffs().end());
    std::vector<cplx> k1u(n), k1v(n), k2u(n), k2v(n), k3u(n), k3v(n), k4u(n), k4v(n);
    std::vector<cplx> su(n), sv(n);

    auto& kr = kernels::active();
    auto axpy = [&](std::vector<cplx>& dst, const std::vector<cplx>& base, double a,
                    const std::vector<cplx>& dir) {
        kr.caxpby(dst.data(), cplx(1.0), base.data(), cplx(a), dir.data(), n);
    };

    std::vector<FirstOrderState> snapshots;
    auto store = [&](double t) {
        std::vector<cplx> u(n), v(n);
        scheme.untwist(t, ut.data(), vt.data(), u.data(), v.data());
        snapshots.push_back({Field::from_coeffs(grid, std::move(u)), Field::from_coeffs(grid, std::move(v)), t});
    };

    store(0.0);
    for (std::size_t step = 0; step < steps; ++step) {
        const double t0 = tau * static_cast<double>(step);
        const double th = tau * (static_cast<double>(step) + 0.5);
        const double t1 = tau * static_cast<double>(step + 1);

        scheme.rhs(t0, ut.data(), vt.data(), k1u.data(), k1v.data());
        axpy(su, ut, 0.5 * tau, k1u);
        axpy(sv, vt, 0.5 * tau, k1v);
        scheme.rhs(th, su.data(), sv.data(), k2u.data(), k2v.data());
        axpy(su, ut, 0.5 * tau, k2u);
        axpy(sv, vt, 0.5 * tau, k2v);
        scheme.rhs(th, su.data(), sv.data(), k3u.data(), k3v.data());
        axpy(su, ut, tau, k3u);
        axpy(sv, vt, tau, k3v);
        scheme.rhs(t1, su.data(), sv.data(), k4u.data(), k4v.data());

        for (std::size_t m = 0; m < n; ++m) {
            ut[m] += (tau / 6.0) * (k1u[m] + 2.0 * k2u[m] + 2.0 * k3u[m] + k4u[m]);
            vt[m] += (tau / 6.0) * (k1v[m] + 2.0 * k2v[m] + 2.0 * k3v[m] + k4v[m]);
        }

        const std::size_t done = step + 1;
        const bool last = done == steps;
        if (last || (options.snapshot_stride != 0 && done % options.snapshot_stride == 0)) store(t1);
    }
    return snapshots;
}

}  // namespace kgnr
