#include "doctest.h"

#include <cmath>
#include <random>
#include <thread>

#include "kgnr/kg_model.hpp"
#include "kgnr/spectral.hpp"
#include "test_helpers.hpp"

using namespace kgnr;
using testing::max_coeff_diff;
using testing::random_field;

TEST_CASE("grid construction") {
    const auto g = make_grid(2);
    CHECK(g->points() == 4);
    CHECK(g->point(0) == doctest::Approx(0.0));
    CHECK(g->point(1) == doctest::Approx(two_pi / 4.0));
    CHECK(g->point(3) == doctest::Approx(3.0 * two_pi / 4.0));
    // mode set {-2,-1,0,1} in wrap-around storage order
    CHECK(g->mode_of(0) == 0);
    CHECK(g->mode_of(1) == 1);
    CHECK(g->mode_of(2) == -2);
    CHECK(g->mode_of(3) == -1);
    CHECK(g->index_of(-1) == 3);

    const auto g16 = make_grid(16);
    CHECK(g16->points() == 32);
    CHECK(g16->spacing() == doctest::Approx(two_pi / 32.0));
    CHECK(g16->mesh() == doctest::Approx(1.0 / 16.0));

    CHECK_THROWS_AS(make_grid(3), config_error);
    CHECK_THROWS_AS(make_grid(0), config_error);
    CHECK_THROWS_AS(make_grid(1), config_error);
    CHECK_THROWS_AS(make_grid(-8), config_error);
    CHECK_THROWS_AS(make_grid(20), config_error);
}

TEST_CASE("transforms") {
    const auto g = make_grid(8);

    SUBCASE("constant maps to the zero mode") {
        const Field f = Field::from_function(g, [](double) { return 1.0; });
        CHECK(std::abs(f.coeff(0) - 1.0) < 1e-14);
        for (int k = -8; k < 8; ++k)
            if (k != 0) CHECK(std::abs(f.coeff(k)) < 1e-14);
    }

    SUBCASE("single harmonic maps to one mode") {
        const Field f = Field::from_function(g, [](double x) { return cplx(std::cos(x), std::sin(x)); });
        CHECK(std::abs(f.coeff(1) - 1.0) < 1e-14);
        CHECK(std::abs(f.coeff(-1)) < 1e-14);
    }

    SUBCASE("round trip is the identity") {
        std::mt19937_64 rng(7u);
        for (int trial = 0; trial < 20; ++trial) {
            const Field f = random_field(g, rng, 8, 0.0);  // full-band random content
            const Field back = Field::from_values(g, f.values());
            CHECK(max_coeff_diff(f, back) <= 1e-12 * sobolev_norm(f, 0.0));
        }
        // including the smallest admissible grids
        for (int K : {2, 4}) {
            const auto small = make_grid(K);
            const Field f = random_field(small, rng, K, 0.0);
            const Field back = Field::from_values(small, f.values());
            CHECK(max_coeff_diff(f, back) <= 1e-12 * sobolev_norm(f, 0.0));
        }
    }

    SUBCASE("a single coefficient produces a pure wave") {
        for (int k : {0, 3, -5, -8}) {
            std::vector<cplx> c(g->points(), cplx(0.0));
            c[g->index_of(k)] = cplx(0.5, -0.25);
            const auto vals = Field::from_coeffs(g, std::move(c)).values();
            for (std::size_t j = 0; j < vals.size(); ++j) {
                const double x = g->point(j);
                const cplx expect = cplx(0.5, -0.25) * cplx(std::cos(k * x), std::sin(k * x));
                CHECK(std::abs(vals[j] - expect) < 1e-13);
            }
        }
    }

    SUBCASE("length mismatch is rejected") {
        std::vector<cplx> short_vec(7);
        std::vector<cplx> out(16);
        CHECK_THROWS_AS(g->forward(short_vec, out), shape_error);
    }
}

TEST_CASE("Parseval identity") {
    const auto g = make_grid(16);
    std::mt19937_64 rng(11u);
    for (int trial = 0; trial < 10; ++trial) {
        const Field f = random_field(g, rng, 16, 0.0);
        const auto vals = f.values();
        double grid_sum = 0.0;
        for (const auto& v : vals) grid_sum += std::norm(v);
        grid_sum *= two_pi / static_cast<double>(g->points());
        double coeff_sum = 0.0;
        for (const auto& c : f.coeffs()) coeff_sum += std::norm(c);
        coeff_sum *= two_pi;
        CHECK(grid_sum == doctest::Approx(coeff_sum).epsilon(1e-10));
    }
}

TEST_CASE("multiplier symbols") {
    const auto g = make_grid(8);

    SUBCASE("smoothing multiplier values") {
        CHECK(symbols::bracket_inv_scaled(3.7).eval(0).real() == doctest::Approx(1.0));
        CHECK(symbols::bracket(10.0).eval(3).real() == doctest::Approx(std::sqrt(109.0)));
        for (double c : {0.5, 1.0, 7.0, 64.0, 1024.0})
            for (int k = -8; k < 8; ++k) CHECK(std::abs(symbols::bracket_inv_scaled(c).eval(k)) <= 1.0);
    }

    SUBCASE("application is diagonal") {
        std::mt19937_64 rng(3u);
        const Field f = random_field(g, rng);
        const Field out = apply_symbol(f, symbols::laplacian());
        for (int k = -8; k < 8; ++k)
            CHECK(std::abs(out.coeff(k) - cplx(-static_cast<double>(k) * k) * f.coeff(k)) < 1e-14);
    }

    SUBCASE("free-flow phase") {
        CHECK(kg_phase_symbol(5, 3.0, 0.0) == cplx(1.0, 0.0));
        const cplx p0 = kg_phase_symbol(0, 4.0, 0.7);
        CHECK(p0.real() == doctest::Approx(std::cos(0.7 * 16.0)));
        CHECK(p0.imag() == doctest::Approx(std::sin(0.7 * 16.0)));
        const cplx p = kg_phase_symbol(2, 5.0, 0.1);
        const double ang = 0.5 * std::sqrt(29.0);
        CHECK(p.real() == doctest::Approx(std::cos(ang)));
        CHECK(p.imag() == doctest::Approx(std::sin(ang)));
        std::mt19937_64 rng(5u);
        std::uniform_real_distribution<double> pick(0.1, 50.0);
        for (int trial = 0; trial < 50; ++trial)
            CHECK(std::abs(kg_phase_symbol(trial % 9 - 4, pick(rng), pick(rng))) == doctest::Approx(1.0));
    }

    SUBCASE("free flow is an isometry in every Sobolev index") {
        std::mt19937_64 rng(13u);
        const Field f = random_field(g, rng);
        for (double s : {0.0, 1.0, 2.5}) {
            const double before = sobolev_norm(f, s);
            const double after = sobolev_norm(apply_symbol(f, symbols::kg_phase(9.0, 0.37)), s);
            CHECK(std::abs(after - before) <= 1e-12 * before);
        }
    }
}

TEST_CASE("norms and quadrature") {
    const auto g = make_grid(8);

    SUBCASE("sobolev norm") {
        std::vector<cplx> c(g->points(), cplx(0.0));
        c[g->index_of(3)] = 1.0;
        const Field f = Field::from_coeffs(g, std::move(c));
        CHECK(sobolev_norm(f, 2.0) == doctest::Approx(std::pow(4.0, 2.0)));
        CHECK(sobolev_norm(Field::zero(g), 1.0) == 0.0);

        std::vector<cplx> c2(g->points(), cplx(0.0));
        c2[g->index_of(0)] = 1.0;
        c2[g->index_of(2)] = 1.0;
        CHECK(sobolev_norm(Field::from_coeffs(g, std::move(c2)), 1.0) ==
              doctest::Approx(std::sqrt(10.0)));
        CHECK_THROWS_AS(sobolev_norm(f, -1.0), parameter_error);
    }

    SUBCASE("torus integral") {
        const Field one = Field::from_function(g, [](double) { return 1.0; });
        CHECK(std::abs(torus_integral(one) - cplx(two_pi)) < 1e-13);
        const Field wave = Field::from_function(g, [](double x) { return cplx(std::cos(x), std::sin(x)); });
        CHECK(std::abs(torus_integral(wave)) < 1e-12);
        const Field cos2 = Field::from_function(g, [](double x) { return std::cos(x) * std::cos(x); });
        CHECK(std::abs(torus_integral(cos2) - cplx(two_pi / 2.0)) < 1e-13);
    }
}

TEST_CASE("two-thirds dealiasing projector") {
    const auto g = make_grid(8);  // cutoff floor(16/3) = 5
    std::mt19937_64 rng(19u);
    const Field f = random_field(g, rng, 8, 0.0);
    const Field cut = dealias_two_thirds(f);
    for (int k = -8; k < 8; ++k) {
        if (std::abs(k) > 5)
            CHECK(std::abs(cut.coeff(k)) == 0.0);
        else
            CHECK(cut.coeff(k) == f.coeff(k));
    }
    // off by default: band-limited inputs pass through unchanged
    CHECK(max_coeff_diff(apply_dealias(f, DealiasRule::none), f) == 0.0);
    const Field low = random_field(g, rng, 3, 0.0);
    CHECK(max_coeff_diff(apply_dealias(low, DealiasRule::two_thirds), low) == 0.0);
}

TEST_CASE("transforms are safe to run concurrently on distinct fields") {
    const auto g = make_grid(16);
    std::mt19937_64 rng(21u);
    std::vector<Field> inputs;
    for (int i = 0; i < 8; ++i) inputs.push_back(random_field(g, rng, 16, 0.0));
    std::vector<double> serial(inputs.size());
    for (std::size_t i = 0; i < inputs.size(); ++i)
        serial[i] = sobolev_norm(Field::from_values(g, inputs[i].values()), 1.0);

    std::vector<double> threaded(inputs.size(), 0.0);
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < inputs.size(); ++i)
        pool.emplace_back([&, i] {
            for (int rep = 0; rep < 50; ++rep)
                threaded[i] = sobolev_norm(Field::from_values(g, inputs[i].values()), 1.0);
        });
    for (auto& th : pool) th.join();
    for (std::size_t i = 0; i < inputs.size(); ++i) CHECK(threaded[i] == serial[i]);
}

TEST_CASE("conjugation in coefficient space") {
    const auto g = make_grid(8);
    std::mt19937_64 rng(17u);
    const Field f = random_field(g, rng, 8, 0.0);  // includes the -K mode
    const Field fc = conj(f);
    const auto vals = f.values();
    const auto cvals = fc.values();
    for (std::size_t j = 0; j < vals.size(); ++j) CHECK(std::abs(cvals[j] - std::conj(vals[j])) < 1e-13);
    // pointwise products land on the expected mode
    const Field wave = Field::from_function(g, [](double x) { return cplx(std::cos(x), std::sin(x)); });
    const Field sq = pointwise_mul(wave, wave);
    CHECK(std::abs(sq.coeff(2) - 1.0) < 1e-13);
}

// Remainder of the dispersion expansion c*sqrt(k^2+c^2) after N correction
// terms. The first subtraction is evaluated in closed form to avoid
// cancellation; the alternating tail then bounds the remainder by its first
// omitted term, and the remainder decays monotonically in c at fixed mode.
namespace {
double dispersion_remainder(int N, double k, double c) {
    const double x = k * k / (c * c);
    const double root = std::sqrt(1.0 + x);
    double r = -(k * k) * (k * k) / (2.0 * c * c * (1.0 + root) * (1.0 + root));
    for (int n = 1; n <= N; ++n)
        r -= series_coefficient(SeriesKind::sqrt, n + 1) * std::pow(c, -2.0 * n) * std::pow(k, 2.0 * n + 2.0);
    return std::abs(r);
}
}  // namespace

TEST_CASE("dispersion expansion remainder per mode") {
    for (int N = 0; N <= 2; ++N) {
        const double lead = std::abs(series_coefficient(SeriesKind::sqrt, N + 2));
        for (double c : {32.0, 64.0, 128.0}) {
            for (int k = 1; k <= 16; ++k) {
                const double r = dispersion_remainder(N, k, c);
                // first-omitted-term bound, uniform in c >= |k|
                CHECK(r <= lead * std::pow(k, 2.0 * N + 4.0) * std::pow(c, -2.0 * N - 2.0) * (1.0 + 1e-12));
                // the bound with (1+|k|) weights as well
                CHECK(r <= lead * std::pow(1.0 + k, 2.0 * N + 4.0) * std::pow(c, -2.0 * N - 2.0));
                // remainder decays when c doubles
                CHECK(dispersion_remainder(N, k, 2.0 * c) < r);
            }
        }
    }
}
