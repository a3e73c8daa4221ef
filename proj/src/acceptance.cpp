#include "kgnr/acceptance.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <random>

#include "kgnr/diagnostics.hpp"
#include "kgnr/harness.hpp"
#include "kgnr/kg_model.hpp"
#include "kgnr/limit_systems.hpp"
#include "kgnr/reconstruction.hpp"

namespace kgnr::acceptance {

namespace {

using clock_type = std::chrono::steady_clock;

std::string fmt(const char* pattern, auto... args) {
    char buf[256];
    std::snprintf(buf, sizeof buf, pattern, args...);
    return buf;
}

bool in_window(double v, double lo, double hi) { return v >= lo && v <= hi; }

ExperimentConfig base_config(ExperimentKind kind) {
    ExperimentConfig cfg;
    cfg.experiment = kind;
    cfg.K = 32;
    cfg.lambda = -1.0;
    return cfg;
}

// Smooth random field: band-limited to |k| <= K/2 with exponentially
// decaying mode amplitudes.
Field random_smooth_field(const GridPtr& grid, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<cplx> coeffs(grid->points(), cplx(0.0));
    const int kmax = grid->modes() / 2;
    for (int k = -kmax; k <= kmax - 1; ++k) {
        const double amp = std::exp(-0.3 * std::abs(k));
        coeffs[grid->index_of(k)] = amp * cplx(gauss(rng), gauss(rng));
    }
    return Field::from_coeffs(grid, std::move(coeffs));
}

// --- criterion 1: linear c-sweep against the exact oracle -------------------

CriterionResult linear_sweep() {
    const auto start = clock_type::now();
    ExperimentConfig cfg = base_config(ExperimentKind::linear_convergence_in_c);
    cfg.T = 1.0;
    cfg.p = 0;
    cfg.c_list = {4, 8, 16, 32, 64};
    cfg.initial_data.preset = "trig_complex";
    const ResultTable table = run_experiment(cfg);
    const double wall = std::chrono::duration<double>(clock_type::now() - start).count();

    const double s1 = -table.series_slope("z0_error").value_or(0.0);
    const double s2 = -table.series_slope("z0_z1_error").value_or(0.0);
    const bool ok = in_window(s1, 1.8, 2.2) && in_window(s2, 3.6, 4.4) && wall < 1.0;
    return {1, "linear c-sweep vs exact solution", ok,
            fmt("order(z0)=%.3f in [1.8,2.2], order(z0+z1)=%.3f in [3.6,4.4], wall=%.3fs < 1s", s1, s2, wall),
            wall};
}

// --- criterion 2: cubic first-order c-sweep ---------------------------------

CriterionResult cubic_first_order() {
    const auto start = clock_type::now();
    ExperimentConfig cfg = base_config(ExperimentKind::cubic_first_order_in_c);
    cfg.T = 0.1;
    cfg.tau = 1e-2;
    cfg.tau_ref = 1e-5;
    cfg.p = 1;
    cfg.c_list = {4, 8, 16, 32};
    cfg.initial_data.preset = "trig_complex";
    const ResultTable table = run_experiment(cfg);
    const double wall = std::chrono::duration<double>(clock_type::now() - start).count();

    const double s1 = -table.series_slope("z0_error").value_or(0.0);
    const bool ok = in_window(s1, 1.7, 2.3) && wall < 60.0;
    return {2, "cubic first-order c-sweep vs resolved reference", ok,
            fmt("order(z0)=%.3f in [1.7,2.3], wall=%.1fs < 60s", s1, wall), wall};
}

// --- criterion 3: cubic second-order c-sweep, arbitrating the forcing -------

CriterionResult cubic_second_order() {
    const auto start = clock_type::now();
    ExperimentConfig cfg = base_config(ExperimentKind::cubic_second_order_in_c);
    cfg.T = 0.1;
    cfg.tau = 1e-3;
    cfg.tau_ref = 1e-5;
    cfg.p = 1;
    cfg.c_list = {4, 8, 16, 32};
    cfg.initial_data.preset = "trig_real";
    cfg.g0_variant = G0Variant::coeff_3_16;

    auto slopes = [](const ResultTable& table) {
        return std::pair<double, double>{-table.series_slope("z0_error").value_or(0.0),
                                         -table.series_slope("z0_z1_error").value_or(0.0)};
    };
    auto [s1, s2] = slopes(run_experiment(cfg));
    std::string variant = "derived_3_16";
    bool second_ok = in_window(s2, 3.4, 4.6);
    if (!second_ok) {
        // The default coefficient missed the fourth-order window; arbitrate
        // empirically with the alternate coefficient.
        cfg.g0_variant = G0Variant::coeff_3_32;
        const auto [a1, a2] = slopes(run_experiment(cfg));
        if (in_window(a2, 3.4, 4.6)) {
            variant = "paper_3_32";
            s1 = a1;
            s2 = a2;
            second_ok = true;
        }
    }
    const double wall = std::chrono::duration<double>(clock_type::now() - start).count();
    const bool ok = in_window(s1, 1.7, 2.3) && second_ok && wall < 90.0;
    return {3, "cubic second-order c-sweep vs resolved reference", ok,
            fmt("order(z0)=%.3f in [1.7,2.3], order(z0+z1)=%.3f in [3.4,4.6] (variant %s), wall=%.1fs < 90s",
                s1, s2, variant.c_str(), wall),
            wall};
}

// --- criterion 4: Strang self-convergence in tau ----------------------------

CriterionResult strang_tau_order() {
    const auto start = clock_type::now();
    ExperimentConfig cfg = base_config(ExperimentKind::tau_convergence);
    cfg.T = 0.1;
    cfg.p = 1;
    cfg.tau_list = {4e-3, 2e-3, 1e-3, 5e-4};
    cfg.initial_data.preset = "trig_real";
    const ResultTable table = run_experiment(cfg);
    const double wall = std::chrono::duration<double>(clock_type::now() - start).count();
    const double s = table.series_slope("strang_self_error").value_or(0.0);
    const bool ok = in_window(s, 1.8, 2.2);
    return {4, "Strang tau-order (tau/64 self-reference)", ok, fmt("order=%.3f in [1.8,2.2]", s), wall};
}

// --- criterion 5: conservation suite ----------------------------------------

CriterionResult conservation_suite() {
    const auto start = clock_type::now();
    ExperimentConfig cfg = base_config(ExperimentKind::conservation_study);
    cfg.T = 1.0;
    cfg.tau = 1e-3;
    cfg.tau_ref = 1e-5;
    cfg.p = 1;
    cfg.c_list = {4, 8, 16, 32};
    cfg.initial_data.preset = "trig_complex";
    cfg.initial_data.normalize_h1 = true;
    cfg.reference_c = 8.0;
    cfg.reference_T = 0.1;
    const ResultTable table = run_experiment(cfg);
    const double wall = std::chrono::duration<double>(clock_type::now() - start).count();

    const double q0 = table.quantity_value("q0_drift").value_or(1.0);
    const double nu = table.quantity_value("u0_norm_drift").value_or(1.0);
    const double nv = table.quantity_value("v0_norm_drift").value_or(1.0);
    const double qr = table.quantity_value("ref_charge_drift_rel").value_or(1.0);
    const double er = table.quantity_value("ref_energy_drift_rel").value_or(1.0);
    const double order = -table.series_slope("z0_charge_deviation").value_or(0.0);
    const double e0_lo = table.quantity_value("e0_deviation", 4.0).value_or(0.0);
    const double e0_hi = table.quantity_value("e0_deviation", 32.0).value_or(1.0);
    const double rest_lo = table.quantity_value("rest_term_magnitude", 4.0).value_or(1.0);
    const double rest_hi = table.quantity_value("rest_term_magnitude", 32.0).value_or(0.0);
    const double e0_ratio = e0_hi / e0_lo;
    const double rest_ratio = rest_hi / rest_lo;

    const bool ok = q0 <= 1e-11 && nu <= 1e-11 && nv <= 1e-11 && qr <= 1e-6 && er <= 1e-6 &&
                    order >= 1.7 && e0_ratio <= 3.0 && rest_ratio >= 20.0;
    return {5, "conservation suite", ok,
            fmt("Q0 drift=%.1e<=1e-11, norm drifts=%.1e/%.1e<=1e-11, ref drifts=%.1e/%.1e<=1e-6, "
                "charge-dev order=%.2f>=1.7, E0-dev ratio=%.2f<=3, rest-term ratio=%.1f>=20",
                q0, nu, nv, qr, er, order, e0_ratio, rest_ratio),
            wall};
}

// --- criterion 6: dispersion expansion remainder bound -----------------------

// Remainder of c*sqrt(k^2+c^2) after subtracting c^2 + k^2/2 and N expansion
// terms, evaluated in a cancellation-free form: the first subtraction has the
// closed form -k^4 / (2 c^2 (1 + sqrt(1+x))^2) with x = k^2/c^2.
double expansion_remainder(int N, double k, double c) {
    const double x = k * k / (c * c);
    const double root = std::sqrt(1.0 + x);
    double r = -(k * k) * (k * k) / (2.0 * c * c * (1.0 + root) * (1.0 + root));
    for (int n = 1; n <= N; ++n)
        r -= series_coefficient(SeriesKind::sqrt, n + 1) * std::pow(c, -2.0 * n) * std::pow(k, 2.0 * n + 2.0);
    return std::abs(r);
}

CriterionResult operator_expansion() {
    const auto start = clock_type::now();
    const double cs[] = {32.0, 64.0, 128.0};
    bool mono_ok = true;
    bool bounded_ok = true;
    std::string detail;
    for (int N = 0; N <= 2; ++N) {
        double fitted[3] = {0.0, 0.0, 0.0};
        for (int ci = 0; ci < 3; ++ci) {
            for (int k = 1; k <= 16; ++k) {
                const double bound = std::pow(cs[ci], -2.0 * N - 2.0) * std::pow(1.0 + k, 2.0 * N + 4.0);
                fitted[ci] = std::max(fitted[ci], expansion_remainder(N, k, cs[ci]) / bound);
            }
        }
        const bool mono = fitted[0] >= fitted[1] && fitted[1] >= fitted[2];
        mono_ok = mono_ok && mono;
        // The analytic supremum of the fitted constant over all c is
        // |alpha_{N+2}| (16/17)^{2N+4}; the per-c fits must stay below it.
        const double analytic =
            std::abs(series_coefficient(SeriesKind::sqrt, N + 2)) * std::pow(16.0 / 17.0, 2.0 * N + 4.0);
        for (double f : fitted) bounded_ok = bounded_ok && f <= analytic * (1.0 + 1e-9);
        detail += fmt("N=%d: C(32/64/128)=%.4e/%.4e/%.4e (sup %.4e)%s ", N, fitted[0], fitted[1],
                      fitted[2], analytic, mono ? "" : " INCREASING");
    }
    if (!mono_ok && bounded_ok)
        detail +=
            "-- remainder bound itself holds (constants converge upward to the analytic supremum, so the "
            "required non-increase in c cannot occur: the expansion series alternates and its tail deficit "
            "shrinks as c grows)";
    const double wall = std::chrono::duration<double>(clock_type::now() - start).count();
    return {6, "dispersion-expansion remainder constants non-increasing in c", mono_ok && bounded_ok,
            detail, wall};
}

// --- criterion 7: oracle equivalences ----------------------------------------

struct M2 {
    double a[2][2];
};

M2 mul(const M2& x, const M2& y) {
    M2 r{};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) r.a[i][j] = x.a[i][0] * y.a[0][j] + x.a[i][1] * y.a[1][j];
    return r;
}

// Independent matrix exponential: scaling and squaring over a plain Taylor
// series, no structure assumptions.
M2 exp_squaring(const M2& m) {
    double norm = 0.0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) norm = std::max(norm, std::abs(m.a[i][j]));
    int s = 0;
    while (norm > 0.25) {
        norm *= 0.5;
        ++s;
    }
    const double scale = std::ldexp(1.0, -s);
    M2 x{{{m.a[0][0] * scale, m.a[0][1] * scale}, {m.a[1][0] * scale, m.a[1][1] * scale}}};
    M2 acc{{{1.0, 0.0}, {0.0, 1.0}}};
    M2 term{{{1.0, 0.0}, {0.0, 1.0}}};
    for (int j = 1; j <= 24; ++j) {
        term = mul(term, x);
        const double inv = 1.0 / std::tgamma(j + 1.0);
        for (int r = 0; r < 2; ++r)
            for (int cidx = 0; cidx < 2; ++cidx) acc.a[r][cidx] += term.a[r][cidx] * inv;
    }
    for (int j = 0; j < s; ++j) acc = mul(acc, acc);
    return acc;
}

CriterionResult oracle_equivalences() {
    const auto start = clock_type::now();
    std::mt19937_64 rng(20240811u);
    const GridPtr grid = make_grid(32);

    // (i) charge/energy in (z, d_t z) vs (u, v) variables on random states
    double worst_q = 0.0, worst_e = 0.0;
    {
        std::uniform_real_distribution<double> cpick(2.0, 40.0);
        for (int trial = 0; trial < 100; ++trial) {
            const Field z = random_smooth_field(grid, rng);
            const Field zt = random_smooth_field(grid, rng);
            const double c = cpick(rng);
            const KGParams params{c, -1.0, 1};
            const FirstOrderState state = to_first_order(z, zt, c);
            const double qz = charge(z, zt, c);
            const double quv = charge_uv(state, c);
            const double ez = energy(z, zt, params);
            const double euv = energy_uv(state, params);
            worst_q = std::max(worst_q, std::abs(qz - quv) / std::max(1.0, std::abs(qz)));
            worst_e = std::max(worst_e, std::abs(ez - euv) / std::max(1.0, std::abs(ez)));
        }
    }

    // (ii) fast-phase average: minimal vs oversampled quadrature, p = 1
    double worst_avg = 0.0;
    {
        for (int trial = 0; trial < 10; ++trial) {
            const NLSPair w{random_smooth_field(grid, rng), random_smooth_field(grid, rng), 0.0};
            const auto lo = averaged_nonlinearity(w, -1.0, 1, 4);
            const auto hi = averaged_nonlinearity(w, -1.0, 1, 32);
            const double scale = std::max(1.0, l2_norm(lo.first));
            worst_avg = std::max(worst_avg, l2_norm(lo.first - hi.first) / scale);
            worst_avg = std::max(worst_avg, l2_norm(lo.second - hi.second) / scale);
        }
    }

    // (iii) traceless 2x2 exponential: closed form vs scaling and squaring
    double worst_mat = 0.0;
    {
        std::uniform_real_distribution<double> entry(-3.0, 3.0);
        for (int trial = 0; trial < 1000; ++trial) {
            const double a = entry(rng), b = entry(rng), c = entry(rng);
            const Mat2 closed = exp_traceless({a, b, c, -a});
            const M2 reference = exp_squaring({{{a, b}, {c, -a}}});
            worst_mat = std::max({worst_mat, std::abs(closed.m00 - reference.a[0][0]),
                                  std::abs(closed.m01 - reference.a[0][1]),
                                  std::abs(closed.m10 - reference.a[1][0]),
                                  std::abs(closed.m11 - reference.a[1][1])});
        }
    }

    const double wall = std::chrono::duration<double>(clock_type::now() - start).count();
    const bool ok = worst_q <= 1e-11 && worst_e <= 1e-11 && worst_avg <= 1e-13 && worst_mat <= 1e-12;
    return {7, "oracle equivalences", ok,
            fmt("charge/energy route diff=%.1e/%.1e<=1e-11, average M=4 vs 32 diff=%.1e<=1e-13, "
                "matexp diff=%.1e<=1e-12",
                worst_q, worst_e, worst_avg, worst_mat),
            wall};
}

CriterionResult dispatch(int id) {
    switch (id) {
        case 1: return linear_sweep();
        case 2: return cubic_first_order();
        case 3: return cubic_second_order();
        case 4: return strang_tau_order();
        case 5: return conservation_suite();
        case 6: return operator_expansion();
        case 7: return oracle_equivalences();
        default: throw config_error("acceptance criterion id must be in [1, 7]");
    }
}

void print_line(std::ostream& log, const CriterionResult& r) {
    log << (r.passed ? "[PASS] " : "[FAIL] ") << "criterion " << r.id << " (" << r.name << "): " << r.detail
        << "\n";
}

}  // namespace

CriterionResult run_one(int id, std::ostream& log) {
    CriterionResult r = dispatch(id);
    print_line(log, r);
    return r;
}

std::vector<CriterionResult> run_all(std::ostream& log) {
    std::vector<CriterionResult> results;
    for (int id = 1; id <= criterion_count; ++id) {
        results.push_back(dispatch(id));
        print_line(log, results.back());
    }
    return results;
}

bool all_passed(const std::vector<CriterionResult>& results) {
    for (const auto& r : results)
        if (!r.passed) return false;
    return true;
}

}  // namespace kgnr::acceptance
