#include "doctest.h"

#include <cmath>
#include <random>

#include "kgnr/harness.hpp"
#include "kgnr/reconstruction.hpp"
#include "test_helpers.hpp"

using namespace kgnr;
using testing::max_coeff_diff;
using testing::random_field;
using testing::random_real_field;

namespace {
InitialData preset(const GridPtr& g, const char* name) {
    InitialDataSpec spec;
    spec.preset = name;
    return build_initial_data(spec, g);
}
}  // namespace

TEST_CASE("first-order reconstruction") {
    const auto g = make_grid(8);
    std::mt19937_64 rng(73u);

    SUBCASE("time zero reproduces phi") {
        const InitialData data{random_field(g, rng), random_field(g, rng)};
        const NLSPair w0 = nls_initial(data);
        const Approximation z0 = reconstruct_first_order(w0, 12.0);
        CHECK(z0.order == ApproxOrder::first);
        CHECK(max_coeff_diff(z0.z, data.phi) < 1e-13);
    }

    SUBCASE("real constant data gives a pure carrier cosine") {
        const double a = 0.8, c = 5.0, t = 0.21;
        const Field flat = Field::from_function(g, [a](double) { return a; });
        const Approximation z0 = reconstruct_first_order({flat, flat, t}, c);
        CHECK(std::abs(z0.z.coeff(0) - a * std::cos(c * c * t)) < 1e-12);
    }

    SUBCASE("linear case matches the per-mode cosine formula") {
        std::vector<cplx> pc(g->points(), cplx(0.0)), gc(g->points(), cplx(0.0));
        pc[g->index_of(2)] = cplx(0.4, -0.1);
        gc[g->index_of(2)] = cplx(-0.2, 0.3);
        const InitialData data{Field::from_coeffs(g, pc), Field::from_coeffs(g, gc)};
        const double lambda = -1.0, c = 7.0, t = 0.9;
        const NLSPair w = linear_limit_exact(data, lambda, t);
        const Field z0 = reconstruct_first_order(w, c).z;
        const double omega = c * c + 0.5 * (4.0 - lambda);
        const cplx expect = cplx(0.4, -0.1) * std::cos(omega * t) + cplx(-0.2, 0.3) * std::sin(omega * t);
        CHECK(std::abs(z0.coeff(2) - expect) <= 1e-11);
    }
}

TEST_CASE("linear second-term reconstruction") {
    const auto g = make_grid(8);

    SUBCASE("zero correction leaves the scaled carrier part") {
        const double a = 0.6, c = 4.0, t = 0.33, lambda = -1.0;
        const Field flat = Field::from_function(g, [a](double) { return a; });
        const CorrectionState corr{Field::zero(g), Field::zero(g), t};
        const Field z1 = reconstruct_linear_correction({flat, flat, t}, corr, lambda, c);
        CHECK(std::abs(z1.coeff(0) - (lambda / 4.0) * a * std::cos(c * c * t)) < 1e-12);
    }

    SUBCASE("t = 0 with resting data agrees with the closed form") {
        std::mt19937_64 rng(79u);
        const InitialData data{random_field(g, rng), Field::zero(g)};
        const double lambda = -1.0, c = 6.0;
        const NLSPair w = linear_limit_exact(data, lambda, 0.0);
        const CorrectionState corr = linear_correction_exact(data, lambda, 0.0);
        const Field assembled = reconstruct_linear_correction(w, corr, lambda, c);
        const Field oracle = linear_z1_closed_form(data, lambda, c, 0.0);
        CHECK(max_coeff_diff(assembled, oracle) <= 1e-11 * std::max(1.0, sobolev_norm(oracle, 0.0)));
    }
}

TEST_CASE("cubic second-order reconstruction") {
    const auto g = make_grid(8);
    std::mt19937_64 rng(83u);

    SUBCASE("vanishing nonlinearity reduces to carrier plus correction phase") {
        const Field u0 = random_real_field(g, rng);
        const Field xi = random_real_field(g, rng);
        const double c = 9.0, t = 0.17;
        const Approximation z2 = reconstruct_second_order_cubic(u0, xi, t, c, 0.0);
        const Field z0 = reconstruct_first_order({u0, u0, t}, c).z;
        const cplx e = carrier_phase(c, t);
        const Field expect = z0 + cplx(1.0 / (2.0 * c * c)) * (e * xi + std::conj(e) * conj(xi));
        CHECK(max_coeff_diff(z2.z, expect) <= 1e-12 * std::max(1.0, sobolev_norm(expect, 0.0)));
    }

    SUBCASE("quarter-period carrier zeroes constant real data") {
        const double a = 1.3, c = 2.0;
        const double t = (two_pi / 4.0) / (c * c);  // c^2 t = pi/2
        const Field flat = Field::from_function(g, [a](double) { return a; });
        const Approximation z2 = reconstruct_second_order_cubic(flat, Field::zero(g), t, c, -1.0);
        CHECK(std::abs(z2.z.coeff(0)) < 1e-12);
    }

    SUBCASE("time zero value on constant data") {
        const double a = 0.7, c = 4.0, lambda = -1.0;
        const Field flat = Field::from_function(g, [a](double) { return a; });
        const Approximation z2 = reconstruct_second_order_cubic(flat, Field::zero(g), 0.0, c, lambda);
        const double inv_c2 = 1.0 / (c * c);
        const double expect =
            (1.0 + inv_c2 * (3.0 * lambda / 16.0) * a * a) * a - (lambda / 32.0) * inv_c2 * a * a * a;
        CHECK(std::abs(z2.z.coeff(0) - expect) < 1e-12);
    }

    SUBCASE("real inputs produce real fields") {
        const Field u0 = random_real_field(g, rng);
        const Field xi = random_real_field(g, rng);
        const Approximation z2 = reconstruct_second_order_cubic(u0, xi, 0.8, 6.0, -1.0);
        const Field imag_part = cplx(0.5) * (z2.z - conj(z2.z));
        CHECK(sobolev_norm(imag_part, 0.0) <= 1e-11 * std::max(1.0, sobolev_norm(z2.z, 0.0)));
    }
}

TEST_CASE("reconstruction is a low-degree polynomial in the carrier phase") {
    // For frozen limit-state inputs the map c^2 t -> z is a trigonometric
    // polynomial of degree <= 3 with time-independent coefficients: sample 8
    // phases, extract the coefficients by DFT, and predict a 9th sample.
    const auto g = make_grid(8);
    std::mt19937_64 rng(89u);
    const Field u0 = random_real_field(g, rng);
    const Field xi = random_real_field(g, rng);
    const double c = 2.0, lambda = -1.0;
    const double period = two_pi / (c * c);

    const std::size_t samples = 8;
    std::vector<std::vector<cplx>> vals;
    for (std::size_t m = 0; m < samples; ++m) {
        const double t = period * static_cast<double>(m) / samples;
        vals.push_back(reconstruct_second_order_cubic(u0, xi, t, c, lambda).z.values());
    }
    // theta-DFT per grid point
    const double probe_t = period * 0.137;
    const auto probe = reconstruct_second_order_cubic(u0, xi, probe_t, c, lambda).z.values();
    for (std::size_t j = 0; j < g->points(); ++j) {
        cplx coeff[8];
        for (int q = 0; q < 8; ++q) {
            coeff[q] = 0.0;
            for (std::size_t m = 0; m < samples; ++m) {
                const double ang = -two_pi * q * static_cast<double>(m) / samples;
                coeff[q] += vals[m][j] * cplx(std::cos(ang), std::sin(ang));
            }
            coeff[q] /= static_cast<double>(samples);
        }
        // wrap-around slot 4 holds degree +-4: must vanish
        CHECK(std::abs(coeff[4]) < 1e-10);
        cplx predicted = 0.0;
        for (int q = 0; q < 8; ++q) {
            const int degree = q < 4 ? q : q - 8;
            const double ang = degree * c * c * probe_t;
            predicted += coeff[q] * cplx(std::cos(ang), std::sin(ang));
        }
        CHECK(std::abs(predicted - probe[j]) < 1e-10);
    }
}

TEST_CASE("second-order reconstruction reproduces phi at time zero") {
    // The real part of xi1(0) cancels the (3 lambda/16)|u0|^2 Re u0 and cubic
    // terms identically, so the combination starts on phi to roundoff.
    const auto g = make_grid(8);
    const InitialData data = preset(g, "trig_real");
    const NLSPair w0 = nls_initial(data);
    const Field xi0 = cubic_correction_initial(w0.u0, -1.0);
    for (double c : {8.0, 16.0}) {
        const double d = l2_norm(reconstruct_second_order_cubic(w0.u0, xi0, 0.0, c, -1.0).z - data.phi);
        CHECK(d <= 1e-12 * std::max(1.0, l2_norm(data.phi)));
    }
}
