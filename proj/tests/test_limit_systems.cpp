#include "doctest.h"

#include <cmath>
#include <random>

#include "kgnr/harness.hpp"
#include "kgnr/limit_systems.hpp"
#include "kgnr/reconstruction.hpp"
#include "test_helpers.hpp"

using namespace kgnr;
using testing::max_coeff_diff;
using testing::random_field;
using testing::random_real_field;

namespace {
const cplx I{0.0, 1.0};

InitialData preset(const GridPtr& g, const char* name) {
    InitialDataSpec spec;
    spec.preset = name;
    return build_initial_data(spec, g);
}
}  // namespace

TEST_CASE("averaged nonlinearity") {
    const auto g = make_grid(8);
    std::mt19937_64 rng(53u);
    const NLSPair w{random_field(g, rng), random_field(g, rng), 0.0};

    SUBCASE("cubic closed form") {
        const auto [f1, f2] = averaged_nonlinearity(w, -1.0, 1, 4);
        const auto uv = w.u0.values();
        const auto vv = w.v0.values();
        const auto f1v = f1.values();
        const auto f2v = f2.values();
        for (std::size_t j = 0; j < uv.size(); ++j) {
            const double ru = std::norm(uv[j]), rv = std::norm(vv[j]);
            CHECK(std::abs(f1v[j] - (-1.0 / 8.0) * (ru + 2.0 * rv) * uv[j]) < 1e-12);
            CHECK(std::abs(f2v[j] - (-1.0 / 8.0) * (rv + 2.0 * ru) * vv[j]) < 1e-12);
        }
    }

    SUBCASE("linear case averages to half") {
        const auto [f1, f2] = averaged_nonlinearity(w, 0.6, 0, 2);
        CHECK(max_coeff_diff(f1, cplx(0.3) * w.u0) < 1e-13);
        CHECK(max_coeff_diff(f2, cplx(0.3) * w.v0) < 1e-13);
    }

    SUBCASE("phase-independent integrand for vanishing partner") {
        const NLSPair lone{w.u0, Field::zero(g), 0.0};
        const auto [f1, f2] = averaged_nonlinearity(lone, 2.0, 2, 6);
        const auto uv = lone.u0.values();
        const auto f1v = f1.values();
        for (std::size_t j = 0; j < uv.size(); ++j) {
            const cplx expect = 2.0 * std::pow(std::abs(0.5 * uv[j]), 4.0) * (0.5 * uv[j]);
            CHECK(std::abs(f1v[j] - expect) < 1e-12);
        }
        CHECK(sobolev_norm(f2, 0.0) < 1e-13);
    }

    SUBCASE("node count below the polynomial degree is rejected") {
        CHECK_THROWS_AS(averaged_nonlinearity(w, -1.0, 1, 3), config_error);
    }

    SUBCASE("minimal and oversampled quadrature coincide") {
        const auto lo = averaged_nonlinearity(w, -1.0, 1, 4);
        const auto hi = averaged_nonlinearity(w, -1.0, 1, 32);
        CHECK(max_coeff_diff(lo.first, hi.first) <= 1e-13 * std::max(1.0, sobolev_norm(lo.first, 0.0)));
        CHECK(max_coeff_diff(lo.second, hi.second) <= 1e-13 * std::max(1.0, sobolev_norm(lo.second, 0.0)));
    }
}

TEST_CASE("splitting substeps") {
    const auto g = make_grid(8);
    std::mt19937_64 rng(59u);

    SUBCASE("free flow for vanishing potential") {
        const Field wave = Field::from_function(g, [](double x) { return cplx(std::cos(x), std::sin(x)); });
        const NLSPair w{wave, Field::zero(g), 0.0};
        const NLSPair out = strang_step(w, 0.0, 1, 0.25);
        CHECK(std::abs(out.u0.coeff(1) - cplx(std::cos(0.125), std::sin(0.125))) < 1e-13);
    }

    SUBCASE("constant fields rotate by the exact phase") {
        const cplx a(1.0, 0.5), b(0.3, -0.2);
        const double lambda = -1.0, tau = 0.37;
        const NLSPair w{Field::from_function(g, [a](double) { return a; }),
                        Field::from_function(g, [b](double) { return b; }), 0.0};
        const NLSPair out = strang_step(w, lambda, 1, tau);
        const double pu = -tau * (lambda / 8.0) * (std::norm(a) + 2.0 * std::norm(b));
        const double pv = -tau * (lambda / 8.0) * (std::norm(b) + 2.0 * std::norm(a));
        CHECK(std::abs(out.u0.coeff(0) - a * cplx(std::cos(pu), std::sin(pu))) < 1e-13);
        CHECK(std::abs(out.v0.coeff(0) - b * cplx(std::cos(pv), std::sin(pv))) < 1e-13);
    }

    SUBCASE("substeps are isometries") {
        const NLSPair w{random_field(g, rng), random_field(g, rng), 0.0};
        const double nu = l2_norm(w.u0);
        const NLSPair kin = kinetic_step(w, 0.173);
        CHECK(std::abs(l2_norm(kin.u0) - nu) <= 1e-12 * nu);
        const NLSPair pot = potential_step(w, -1.0, 1, 0.173);
        CHECK(std::abs(l2_norm(pot.u0) - nu) <= 1e-12 * nu);
        // the potential flow preserves the modulus pointwise
        const auto before = w.u0.values();
        const auto after = pot.u0.values();
        for (std::size_t j = 0; j < before.size(); ++j)
            CHECK(std::abs(std::abs(after[j]) - std::abs(before[j])) <= 1e-13 * std::abs(before[j]));
    }

    SUBCASE("a step followed by its reverse is the identity") {
        const NLSPair w{random_field(g, rng), random_field(g, rng), 0.0};
        const NLSPair fwd = strang_step(w, -1.0, 1, 0.05);
        const NLSPair back = strang_step(fwd, -1.0, 1, -0.05);
        CHECK(max_coeff_diff(back.u0, w.u0) < 1e-13);
        CHECK(max_coeff_diff(back.v0, w.v0) < 1e-13);
    }

    SUBCASE("second-order self-convergence") {
        const InitialData data = preset(g, "trig_real");
        const NLSPair w0 = nls_initial(data);
        std::vector<std::pair<double, double>> pts;
        for (double tau : {4e-3, 2e-3, 1e-3}) {
            const auto coarse = solve_nls(w0, -1.0, 1, {tau, 4}, 0.1, 0).states.back();
            const auto fine = solve_nls(w0, -1.0, 1, {tau / 64.0, 4}, 0.1, 0).states.back();
            pts.emplace_back(tau, l2_norm(coarse.u0 - fine.u0));
        }
        CHECK(fit_slope(pts) == doctest::Approx(2.0).epsilon(0.1));
    }
}

TEST_CASE("limit-system trajectories") {
    const auto g = make_grid(8);

    SUBCASE("free single-mode flow") {
        const Field wave = Field::from_function(g, [](double x) { return cplx(std::cos(x), std::sin(x)); });
        const auto traj = solve_nls({wave, Field::zero(g), 0.0}, 0.0, 1, {1e-2, 4}, 0.5, 0);
        const cplx expect = cplx(std::cos(0.25), std::sin(0.25));
        CHECK(std::abs(traj.states.back().u0.coeff(1) - expect) < 1e-12);
    }

    SUBCASE("norms are conserved along the trajectory") {
        const InitialData data = preset(g, "trig_complex");
        const auto traj = solve_nls(nls_initial(data), -1.0, 1, {1e-3, 4}, 0.5, 10);
        const double nu = l2_norm(traj.states.front().u0);
        const double nv = l2_norm(traj.states.front().v0);
        for (const auto& s : traj.states) {
            CHECK(std::abs(l2_norm(s.u0) - nu) <= 1e-11 * nu);
            CHECK(std::abs(l2_norm(s.v0) - nv) <= 1e-11 * nv);
        }
    }

    SUBCASE("real data keeps the pair diagonal") {
        const InitialData data = preset(g, "trig_real");
        const auto traj = solve_nls(nls_initial(data), -1.0, 1, {1e-3, 4}, 0.2, 20);
        for (const auto& s : traj.states) CHECK(max_coeff_diff(s.u0, s.v0) < 1e-12);
    }

    SUBCASE("non-integer step counts snap and report") {
        const InitialData data = preset(g, "trig_real");
        const auto traj = solve_nls(nls_initial(data), -1.0, 1, {0.03, 4}, 0.1, 0);
        CHECK(traj.tau == doctest::Approx(0.1 / 3.0));
        CHECK(traj.states.back().t == doctest::Approx(0.1));
    }
}

TEST_CASE("linear limit and correction closed forms") {
    const auto g = make_grid(8);
    std::mt19937_64 rng(61u);

    SUBCASE("limit flow phases") {
        std::vector<cplx> pc(g->points(), cplx(0.0));
        pc[g->index_of(1)] = 1.0;
        const InitialData data{Field::from_coeffs(g, pc), Field::zero(g)};
        const NLSPair w = linear_limit_exact(data, -1.0, 1.0);
        CHECK(std::abs(w.u0.coeff(1) - cplx(std::cos(1.0), std::sin(1.0))) < 1e-13);  // (a^2-lambda)/2 = 1
        const NLSPair at0 = linear_limit_exact(data, -1.0, 0.0);
        CHECK(max_coeff_diff(at0.u0, data.phi) < 1e-14);
        const InitialData flat{Field::from_function(g, [](double) { return 1.0; }), Field::zero(g)};
        const NLSPair still = linear_limit_exact(flat, 0.0, 2.3);
        CHECK(std::abs(still.u0.coeff(0) - 1.0) < 1e-13);
    }

    SUBCASE("correction initial values") {
        const InitialData data{random_field(g, rng), random_field(g, rng)};
        const NLSPair w0 = nls_initial(data);
        const CorrectionState corr = linear_correction_exact(data, -1.0, 0.0);
        const auto lap = symbols::laplacian();
        const Field xi_expect =
            0.25 * (apply_symbol(w0.u0, lap) - apply_symbol(conj(w0.v0), lap) - cplx(-1.0) * conj(w0.v0));
        CHECK(max_coeff_diff(corr.xi1, xi_expect) < 1e-12);
    }

    SUBCASE("zero forcing and zero data stay zero") {
        const InitialData flat{Field::from_function(g, [](double) { return 0.7; }), Field::zero(g)};
        const CorrectionState corr = linear_correction_exact(flat, 0.0, 1.3);
        CHECK(sobolev_norm(corr.xi1, 0.0) < 1e-14);
        CHECK(sobolev_norm(corr.eta1, 0.0) < 1e-14);
    }

    SUBCASE("resonant growth is linear in time") {
        std::vector<cplx> pc(g->points(), cplx(0.0));
        pc[g->index_of(1)] = 1.0;
        const InitialData data{Field::from_coeffs(g, pc), Field::zero(g)};
        const double lambda = -1.0;
        const double secular = (1.0 - lambda) * (1.0 - lambda) / 8.0;
        for (double t : {0.5, 1.0, 2.0, 7.0}) {
            const CorrectionState corr = linear_correction_exact(data, lambda, t);
            const double expect = std::hypot(lambda / 4.0, t * secular);
            CHECK(std::abs(corr.xi1.coeff(1)) == doctest::Approx(expect).epsilon(1e-12));
        }
    }

    SUBCASE("closed-form second term on resting single-mode data") {
        std::vector<cplx> pc(g->points(), cplx(0.0));
        pc[g->index_of(2)] = cplx(0.7, -0.2);
        const InitialData data{Field::from_coeffs(g, pc), Field::zero(g)};
        const double lambda = -1.0, c = 5.0, t = 0.8;
        const Field z1 = linear_z1_closed_form(data, lambda, c, t);
        const double a2l = 4.0 - lambda;
        const double omega = c * c + 0.5 * a2l;
        const cplx expect = cplx(0.7, -0.2) * (a2l * a2l * t / 8.0) * std::sin(omega * t);
        CHECK(std::abs(z1.coeff(2) - expect) < 1e-12);
        for (int k = -8; k < 8; ++k)
            if (k != 2) CHECK(std::abs(z1.coeff(k)) < 1e-14);
    }

    SUBCASE("assembled second term matches the single-formula oracle") {
        const InitialData data{random_field(g, rng), random_field(g, rng)};
        const double lambda = -1.0;
        for (double c : {4.0, 16.0}) {
            for (double t : {0.3, 1.0}) {
                const NLSPair w = linear_limit_exact(data, lambda, t);
                const CorrectionState corr = linear_correction_exact(data, lambda, t);
                const Field assembled = reconstruct_linear_correction(w, corr, lambda, c);
                const Field oracle = linear_z1_closed_form(data, lambda, c, t);
                CHECK(max_coeff_diff(assembled, oracle) <= 1e-10 * std::max(1.0, sobolev_norm(oracle, 0.0)));
            }
        }
    }

    SUBCASE("second-order combination converges at fourth order in c") {
        const InitialData data = preset(g, "trig_complex");
        const double lambda = -1.0, T = 1.0;
        std::vector<std::pair<double, double>> pts;
        for (double c : {4.0, 8.0, 16.0, 32.0, 64.0}) {
            const Field z = exact_linear_solution(data, {c, lambda, 0}, T);
            const NLSPair w = linear_limit_exact(data, lambda, T);
            const CorrectionState corr = linear_correction_exact(data, lambda, T);
            const Field z0 = reconstruct_first_order(w, c).z;
            const Field z1 = reconstruct_linear_correction(w, corr, lambda, c);
            pts.emplace_back(c, l2_norm(z - (z0 + cplx(1.0 / (c * c)) * z1)));
        }
        CHECK(-fit_slope(pts) == doctest::Approx(4.0).epsilon(0.075));
    }
}

TEST_CASE("cubic correction forcing") {
    const auto g = make_grid(8);

    SUBCASE("constants keep only the quintic term") {
        const cplx a(0.8, -0.4);
        const Field u = Field::from_function(g, [a](double) { return a; });
        const Field g0 = correction_forcing(u, -1.0);
        const cplx expect = (51.0 / 256.0) * std::pow(std::abs(a), 4.0) * a;
        CHECK(std::abs(g0.coeff(0) - expect) < 1e-12);
    }

    SUBCASE("single harmonic collects all three terms") {
        const Field u = Field::from_function(g, [](double x) { return cplx(std::cos(x), std::sin(x)); });
        const double lambda = -1.0;
        const Field d16 = correction_forcing(u, lambda, G0Variant::coeff_3_16);
        const cplx expect16 = 0.125 + (51.0 / 256.0) * lambda * lambda - (3.0 / 16.0) * lambda;
        CHECK(std::abs(d16.coeff(1) - expect16) < 1e-12);
        const Field d32 = correction_forcing(u, lambda, G0Variant::coeff_3_32);
        const cplx expect32 = 0.125 + (51.0 / 256.0) * lambda * lambda - (3.0 / 32.0) * lambda;
        CHECK(std::abs(d32.coeff(1) - expect32) < 1e-12);
    }

    SUBCASE("the biharmonic part is linear") {
        std::mt19937_64 rng(67u);
        const Field a = random_field(g, rng);
        const Field b = random_field(g, rng);
        const Field lhs = correction_forcing(a + b, 0.0);
        const Field rhs = correction_forcing(a, 0.0) + correction_forcing(b, 0.0);
        CHECK(max_coeff_diff(lhs, rhs) <= 1e-12 * std::max(1.0, sobolev_norm(rhs, 0.0)));
    }
}

TEST_CASE("traceless matrix exponential") {
    SUBCASE("identity at zero") {
        const Mat2 e = exp_traceless({0.0, 0.0, 0.0, 0.0});
        CHECK(e.m00 == doctest::Approx(1.0));
        CHECK(e.m11 == doctest::Approx(1.0));
        CHECK(e.m01 == doctest::Approx(0.0));
    }
    SUBCASE("rotation branch") {
        const double s = 0.73;
        const Mat2 e = exp_traceless({0.0, s, -s, 0.0});
        CHECK(e.m00 == doctest::Approx(std::cos(s)));
        CHECK(e.m01 == doctest::Approx(std::sin(s)));
        CHECK(e.m10 == doctest::Approx(-std::sin(s)));
    }
    SUBCASE("hyperbolic branch") {
        const double s = 1.2;
        const Mat2 e = exp_traceless({s, 0.0, 0.0, -s});
        CHECK(e.m00 == doctest::Approx(std::exp(s)));
        CHECK(e.m11 == doctest::Approx(std::exp(-s)));
    }
    SUBCASE("series fallback near zero") {
        const double s = 1e-8;
        const Mat2 e = exp_traceless({0.0, s, -s, 0.0});
        CHECK(e.m00 == doctest::Approx(1.0));
        CHECK(e.m01 == doctest::Approx(s));
    }
}

TEST_CASE("exponential trapezoidal potential step") {
    const auto g = make_grid(8);

    SUBCASE("vanishing coefficient field is the identity") {
        std::mt19937_64 rng(71u);
        const Field xi = random_field(g, rng);
        const Field zero = Field::zero(g);
        const Field out = potential_step_exp_trapezoid(xi, zero, zero, -1.0, 0.05);
        CHECK(max_coeff_diff(out, xi) < 1e-13);
    }

    SUBCASE("constant coefficients match the scalar update formula") {
        const cplx u(0.6, 0.3), xi0(0.2, -0.5);
        const double lambda = -1.0, tau = 0.04;
        const Field xi = Field::from_function(g, [xi0](double) { return xi0; });
        const Field u0 = Field::from_function(g, [u](double) { return u; });
        const Field out = potential_step_exp_trapezoid(xi, u0, u0, lambda, tau);

        const double a0 = u.real(), b0 = u.imag();
        const double s = 3.0 * lambda / 8.0;
        const Mat2 a{s * 2.0 * a0 * b0, s * (a0 * a0 + 3.0 * b0 * b0), -s * (3.0 * a0 * a0 + b0 * b0),
                     -s * 2.0 * a0 * b0};
        const Mat2 e = exp_traceless({tau * a.m00, tau * a.m01, tau * a.m10, tau * a.m11});
        const cplx gval = (51.0 / 256.0) * lambda * lambda * std::pow(std::abs(u), 4.0) * u;
        const double y0 = xi0.real() + 0.5 * tau * gval.imag();
        const double y1 = xi0.imag() - 0.5 * tau * gval.real();
        const cplx expect(e.m00 * y0 + e.m01 * y1 + 0.5 * tau * gval.imag(),
                          e.m10 * y0 + e.m11 * y1 - 0.5 * tau * gval.real());
        CHECK(std::abs(out.coeff(0) - expect) < 1e-13);
    }
}

TEST_CASE("cubic correction solver") {
    const auto g = make_grid(16);
    const InitialData data = preset(g, "trig_real");

    SUBCASE("initial value for purely real limit data") {
        std::vector<cplx> pc(g->points(), cplx(0.0));
        pc[g->index_of(1)] = 0.5;
        pc[g->index_of(-1)] = 0.5;  // cos x
        const Field u0 = Field::from_coeffs(g, pc);
        const double lambda = -1.0;
        const Field xi0 = cubic_correction_initial(u0, lambda);
        const auto uv = u0.values();
        const auto xv = xi0.values();
        for (std::size_t j = 0; j < uv.size(); ++j) {
            const cplx expect = -(5.0 * lambda / 32.0) * uv[j] * uv[j] * uv[j];
            CHECK(std::abs(xv[j] - expect) < 1e-12);
        }
    }

    SUBCASE("vanishing nonlinearity against the resonant closed form") {
        // With lambda = 0 the pair flow is free and the correction equation
        // is forced by (1/8) Laplace^2 u0 alone; per mode
        //   xi(t) = e^{i k^2 t/2} (xi(0) - i (k^4/8) t u0_h(0)).
        const double T = 0.1;
        const NLSPair w0 = nls_initial(data);
        std::vector<std::pair<double, double>> pts;
        for (double tau : {2e-3, 1e-3, 5e-4}) {
            const auto limit = solve_nls(w0, 0.0, 1, {tau, 4}, T, 1);
            const auto corr = solve_correction_cubic(limit, data, 0.0, G0Variant::coeff_3_16, 0);
            std::vector<cplx> expect(g->points());
            for (std::size_t m = 0; m < g->points(); ++m) {
                const double k2 = static_cast<double>(g->mode_of(m)) * g->mode_of(m);
                const cplx phase(std::cos(0.5 * k2 * T), std::sin(0.5 * k2 * T));
                const cplx xi0 = cubic_correction_initial(w0.u0, 0.0).coeffs()[m];
                expect[m] = phase * (xi0 - I * (k2 * k2 / 8.0) * T * w0.u0.coeffs()[m]);
            }
            const Field oracle = Field::from_coeffs(g, std::move(expect));
            pts.emplace_back(tau, l2_norm(corr.states.back().xi1 - oracle));
        }
        CHECK(fit_slope(pts) == doctest::Approx(2.0).epsilon(0.1));
    }

    SUBCASE("second-order self-convergence with the full coupling") {
        const double T = 0.1;
        const NLSPair w0 = nls_initial(data);
        std::vector<std::pair<double, double>> pts;
        const auto fine_limit = solve_nls(w0, -1.0, 1, {1e-3 / 64.0, 4}, T, 1);
        const Field fine = solve_correction_cubic(fine_limit, data, -1.0).states.back().xi1;
        for (double tau : {4e-3, 2e-3, 1e-3}) {
            const auto limit = solve_nls(w0, -1.0, 1, {tau, 4}, T, 1);
            const auto corr = solve_correction_cubic(limit, data, -1.0, G0Variant::coeff_3_16, 0);
            pts.emplace_back(tau, l2_norm(corr.states.back().xi1 - fine));
        }
        CHECK(fit_slope(pts) == doctest::Approx(2.0).epsilon(0.1));
    }

    SUBCASE("a decimated limit trajectory is rejected") {
        const auto limit = solve_nls(nls_initial(data), -1.0, 1, {1e-3, 4}, 0.02, 2);
        CHECK_THROWS_AS(solve_correction_cubic(limit, data, -1.0), config_error);
    }

    SUBCASE("complex data is outside the supported regime") {
        const InitialData complex_data = preset(g, "trig_complex");
        const auto limit = solve_nls(nls_initial(complex_data), -1.0, 1, {1e-3, 4}, 0.02, 1);
        CHECK_THROWS_AS(solve_correction_cubic(limit, complex_data, -1.0), parameter_error);
    }
}
