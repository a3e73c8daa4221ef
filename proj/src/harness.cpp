#include "kgnr/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "kgnr/kg_model.hpp"
#include "kgnr/reconstruction.hpp"

namespace kgnr {

namespace {

using json = nlohmann::json;
using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point start) {
    return std::chrono::duration<double>(clock_type::now() - start).count();
}

struct KindName {
    ExperimentKind kind;
    const char* name;
    const char* description;
};

constexpr KindName kind_names[] = {
    {ExperimentKind::linear_convergence_in_c, "linear_convergence_in_c",
     "linear problem: L2 error of the first/second asymptotic terms against the exact solution, swept over c"},
    {ExperimentKind::cubic_first_order_in_c, "cubic_first_order_in_c",
     "cubic problem: L2 error of the first-order term against a resolved reference, swept over c"},
    {ExperimentKind::cubic_second_order_in_c, "cubic_second_order_in_c",
     "cubic problem: L2 errors of the first- and second-order terms against a resolved reference, swept over c"},
    {ExperimentKind::tau_convergence, "tau_convergence",
     "cubic limit system: Strang self-convergence against a tau/64 reference, swept over tau"},
    {ExperimentKind::conservation_study, "conservation_study",
     "charge/energy invariants: splitting drifts, reference drifts, and c-scaling of the first-order deviations"},
};

}  // namespace

std::string experiment_name(ExperimentKind kind) {
    for (const auto& kn : kind_names)
        if (kn.kind == kind) return kn.name;
    throw config_error("unknown experiment kind");
}

ExperimentKind experiment_from_name(const std::string& name) {
    for (const auto& kn : kind_names)
        if (name == kn.name) return kn.kind;
    throw config_error("unknown experiment '" + name + "'");
}

std::vector<std::pair<std::string, std::string>> experiment_catalog() {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& kn : kind_names) out.emplace_back(kn.name, kn.description);
    return out;
}

void ExperimentConfig::validate() const {
    if (K < 2) throw config_error("K must be at least 2");
    if (!(T > 0.0)) throw config_error("T must be positive");
    if (!(lambda == lambda)) throw config_error("lambda must be a number");
    if (p < 0) throw config_error("p must be nonnegative");

    auto require_c_list = [&] {
        if (c_list.empty()) throw config_error("c_list must not be empty");
        for (std::size_t i = 0; i < c_list.size(); ++i) {
            if (!(c_list[i] > 0.0)) throw config_error("c_list entries must be positive");
            if (i > 0 && !(c_list[i] > c_list[i - 1]))
                throw config_error("c_list must be strictly increasing");
        }
    };
    auto require_reference_guard = [&](double c) {
        if (!(tau_ref > 0.0)) throw config_error("tau_ref must be positive");
        if (tau_ref * c * c > 0.1 + 1e-12) {
            char buf[160];
            std::snprintf(buf, sizeof buf,
                          "reference guard violated before any computation: tau_ref*c^2 = %.3g > 0.1 at c = %g",
                          tau_ref * c * c, c);
            throw guard_violation(buf);
        }
    };

    switch (experiment) {
        case ExperimentKind::linear_convergence_in_c:
            if (p != 0) throw config_error("linear_convergence_in_c requires p = 0");
            require_c_list();
            break;
        case ExperimentKind::cubic_first_order_in_c:
            if (p != 1) throw config_error("cubic_first_order_in_c requires p = 1");
            if (!(tau > 0.0)) throw config_error("tau must be positive");
            require_c_list();
            require_reference_guard(c_list.back());
            break;
        case ExperimentKind::cubic_second_order_in_c:
            if (p != 1) throw config_error("cubic_second_order_in_c requires p = 1");
            if (!(tau > 0.0)) throw config_error("tau must be positive");
            require_c_list();
            require_reference_guard(c_list.back());
            break;
        case ExperimentKind::tau_convergence:
            if (tau_list.empty()) throw config_error("tau_list must not be empty");
            for (double t : tau_list)
                if (!(t > 0.0)) throw config_error("tau_list entries must be positive");
            break;
        case ExperimentKind::conservation_study:
            if (!(tau > 0.0)) throw config_error("tau must be positive");
            require_c_list();
            if (!(reference_c > 0.0) || !(reference_T > 0.0))
                throw config_error("conservation_study requires positive reference_c and reference_T");
            require_reference_guard(reference_c);
            break;
    }
}

namespace {

cplx parse_cplx(const json& j, const char* what) {
    if (j.is_number()) return cplx(j.get<double>(), 0.0);
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return cplx(j[0].get<double>(), j[1].get<double>());
    throw config_error(std::string(what) + " must be a number or [re, im] pair");
}

InitialDataSpec parse_initial_data(const json& j) {
    InitialDataSpec spec;
    if (j.is_string()) {
        spec.preset = j.get<std::string>();
        return spec;
    }
    if (!j.is_object()) throw config_error("initial_data must be a preset name or an object");
    if (j.contains("preset")) spec.preset = j.at("preset").get<std::string>();
    if (j.contains("normalize_h1")) spec.normalize_h1 = j.at("normalize_h1").get<bool>();
    if (j.contains("modes")) {
        for (const auto& entry : j.at("modes")) {
            ModeEntry mode{};
            mode.k = entry.at("k").get<int>();
            mode.phi = entry.contains("phi") ? parse_cplx(entry.at("phi"), "phi") : cplx(0.0);
            mode.gamma = entry.contains("gamma") ? parse_cplx(entry.at("gamma"), "gamma") : cplx(0.0);
            spec.modes.push_back(mode);
        }
    }
    if (spec.preset.empty() && spec.modes.empty())
        throw config_error("initial_data needs a preset or a mode table");
    return spec;
}

ExperimentConfig parse_config(const json& j) {
    ExperimentConfig cfg;
    try {
        cfg.experiment = experiment_from_name(j.at("experiment").get<std::string>());
        if (j.contains("K")) cfg.K = j.at("K").get<int>();
        if (j.contains("T")) cfg.T = j.at("T").get<double>();
        if (j.contains("tau")) cfg.tau = j.at("tau").get<double>();
        if (j.contains("tau_ref")) cfg.tau_ref = j.at("tau_ref").get<double>();
        if (j.contains("c_list")) cfg.c_list = j.at("c_list").get<std::vector<double>>();
        if (j.contains("tau_list")) cfg.tau_list = j.at("tau_list").get<std::vector<double>>();
        if (j.contains("lambda")) cfg.lambda = j.at("lambda").get<double>();
        if (j.contains("p")) cfg.p = j.at("p").get<int>();
        if (j.contains("initial_data")) cfg.initial_data = parse_initial_data(j.at("initial_data"));
        if (j.contains("g0_variant")) {
            const auto v = j.at("g0_variant").get<std::string>();
            if (v == "derived_3_16")
                cfg.g0_variant = G0Variant::coeff_3_16;
            else if (v == "paper_3_32")
                cfg.g0_variant = G0Variant::coeff_3_32;
            else
                throw config_error("g0_variant must be 'derived_3_16' or 'paper_3_32'");
        }
        if (j.contains("output_dir")) cfg.output_dir = j.at("output_dir").get<std::string>();
        if (j.contains("reference_c")) cfg.reference_c = j.at("reference_c").get<double>();
        if (j.contains("reference_T")) cfg.reference_T = j.at("reference_T").get<double>();
    } catch (const json::exception& e) {
        throw config_error(std::string("malformed config: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

}  // namespace

ExperimentConfig config_from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw config_error(std::string("config is not valid JSON: ") + e.what());
    }
    return parse_config(j);
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file '" + path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return config_from_json_text(buffer.str());
}

InitialData build_initial_data(const InitialDataSpec& spec, const GridPtr& grid) {
    Field phi = Field::zero(grid);
    Field gamma = Field::zero(grid);
    if (!spec.preset.empty()) {
        if (spec.preset == "trig_complex") {
            const cplx a = cplx(2.0, 1.0) / std::sqrt(5.0);
            const cplx b = cplx(1.0, 1.0) / std::sqrt(2.0);
            phi = Field::from_function(grid, [a](double x) { return a * std::cos(x); });
            gamma = Field::from_function(grid, [b](double x) { return b * std::sin(x) + 0.5 * std::cos(x); });
        } else if (spec.preset == "trig_real") {
            phi = Field::from_function(grid, [](double x) { return std::cos(x); });
            gamma = Field::from_function(grid, [](double x) { return 0.25 * std::sin(x) + 0.5 * std::cos(x); });
        } else {
            throw config_error("unknown initial-data preset '" + spec.preset + "'");
        }
    } else if (!spec.modes.empty()) {
        std::vector<cplx> pc(grid->points(), cplx(0.0)), gc(grid->points(), cplx(0.0));
        for (const auto& mode : spec.modes) {
            if (mode.k < -grid->modes() || mode.k > grid->modes() - 1)
                throw config_error("mode index " + std::to_string(mode.k) + " outside the grid mode set");
            pc[grid->index_of(mode.k)] += mode.phi;
            gc[grid->index_of(mode.k)] += mode.gamma;
        }
        phi = Field::from_coeffs(grid, std::move(pc));
        gamma = Field::from_coeffs(grid, std::move(gc));
    } else {
        throw config_error("initial data unspecified");
    }
    if (spec.normalize_h1) {
        const double np = sobolev_norm(phi, 1.0);
        const double ng = sobolev_norm(gamma, 1.0);
        if (np <= 0.0 || ng <= 0.0) throw config_error("cannot H1-normalize a zero field");
        phi *= cplx(1.0 / np);
        gamma *= cplx(1.0 / ng);
    }
    return {std::move(phi), std::move(gamma)};
}

namespace {

json field_to_json(const Field& f) {
    json j = json::array();
    for (const auto& c : f.coeffs()) j.push_back({c.real(), c.imag()});
    return j;
}

Field field_from_json(const json& j, const GridPtr& grid) {
    if (!j.is_array() || j.size() != grid->points())
        throw config_error("snapshot component has the wrong number of modes");
    std::vector<cplx> coeffs(grid->points());
    for (std::size_t m = 0; m < coeffs.size(); ++m)
        coeffs[m] = cplx(j[m][0].get<double>(), j[m][1].get<double>());
    return Field::from_coeffs(grid, std::move(coeffs));
}

template <typename State>
std::string snapshot_text(const State& state, const Field& a, const Field& b, const char* first,
                          const char* second) {
    json j;
    j["t"] = state.t;
    j["K"] = a.grid()->modes();
    j[first] = field_to_json(a);
    j[second] = field_to_json(b);
    return j.dump();
}

json parse_snapshot(const std::string& text, const GridPtr& grid) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw config_error(std::string("snapshot is not valid JSON: ") + e.what());
    }
    if (j.value("K", grid->modes()) != grid->modes())
        throw config_error("snapshot grid size does not match the supplied grid");
    return j;
}

}  // namespace

std::string snapshot_to_json(const FirstOrderState& state) {
    return snapshot_text(state, state.u, state.v, "u", "v");
}

std::string snapshot_to_json(const NLSPair& state) {
    return snapshot_text(state, state.u0, state.v0, "u0", "v0");
}

FirstOrderState first_order_snapshot_from_json(const std::string& text, const GridPtr& grid) {
    const json j = parse_snapshot(text, grid);
    return {field_from_json(j.at("u"), grid), field_from_json(j.at("v"), grid), j.at("t").get<double>()};
}

NLSPair pair_snapshot_from_json(const std::string& text, const GridPtr& grid) {
    const json j = parse_snapshot(text, grid);
    return {field_from_json(j.at("u0"), grid), field_from_json(j.at("v0"), grid), j.at("t").get<double>()};
}

int sweep_threads() {
    if (const char* env = std::getenv("KGNR_THREADS")) {
        const int n = std::atoi(env);
        if (n >= 1) return n;
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

namespace {

// Runs fn(0..count-1), possibly concurrently; results must be written into
// caller-owned slots so gather order never depends on scheduling.
template <typename Fn>
void parallel_for_ordered(std::size_t count, Fn&& fn) {
    const std::size_t workers = std::min<std::size_t>(count, static_cast<std::size_t>(sweep_threads()));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::mutex error_mutex;
    std::exception_ptr first_error;
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count || failed.load()) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                failed.store(true);
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

ResultRow base_row(const ExperimentConfig& cfg) {
    ResultRow row;
    row.h = 1.0 / cfg.K;
    row.K = cfg.K;
    row.T = cfg.T;
    row.tau = cfg.tau;
    return row;
}

// Fit a signed log-log slope across the rows of one series (keyed by the
// quantity name) using column x = c or tau, y = value.
void fit_series_slope(std::vector<ResultRow>& rows, const std::string& series, bool x_is_tau) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& row : rows)
        if (row.quantity == series && row.value > 0.0) pts.emplace_back(x_is_tau ? row.tau : row.c, row.value);
    if (pts.size() < 3) return;
    const double slope = fit_slope(pts);
    for (auto& row : rows)
        if (row.quantity == series) row.slope = slope;
}

std::vector<ResultRow> run_linear_convergence(const ExperimentConfig& cfg) {
    const GridPtr grid = make_grid(cfg.K);
    const InitialData data = build_initial_data(cfg.initial_data, grid);

    std::vector<std::vector<ResultRow>> slots(cfg.c_list.size());
    parallel_for_ordered(cfg.c_list.size(), [&](std::size_t i) {
        const auto start = clock_type::now();
        const double c = cfg.c_list[i];
        const KGParams params{c, cfg.lambda, 0};
        const Field z_exact = exact_linear_solution(data, params, cfg.T);
        const NLSPair w = linear_limit_exact(data, cfg.lambda, cfg.T);
        const Field z0 = reconstruct_first_order(w, c).z;
        const CorrectionState corr = linear_correction_exact(data, cfg.lambda, cfg.T);
        const Field z1 = reconstruct_linear_correction(w, corr, cfg.lambda, c);
        const double e1 = l2_norm(z_exact - z0);
        const double e2 = l2_norm(z_exact - (z0 + cplx(1.0 / (c * c)) * z1));
        const double elapsed = seconds_since(start);

        ResultRow row = base_row(cfg);
        row.c = c;
        row.tau = 0.0;  // no time stepping on this path
        row.runtime_s = elapsed;
        row.quantity = "z0_error";
        row.error_l2 = e1;
        row.value = e1;
        slots[i].push_back(row);
        row.quantity = "z0_z1_error";
        row.error_l2 = e2;
        row.value = e2;
        slots[i].push_back(row);
    });

    std::vector<ResultRow> rows;
    for (auto& slot : slots)
        for (auto& row : slot) rows.push_back(std::move(row));
    fit_series_slope(rows, "z0_error", false);
    fit_series_slope(rows, "z0_z1_error", false);
    return rows;
}

std::vector<ResultRow> run_cubic_convergence(const ExperimentConfig& cfg, bool second_order) {
    const GridPtr grid = make_grid(cfg.K);
    const InitialData data = build_initial_data(cfg.initial_data, grid);

    // The limit systems are c-independent: integrate once, reuse per c.
    const SplittingConfig split{cfg.tau, 4};
    const LimitTrajectory limit = solve_nls(nls_initial(data), cfg.lambda, 1, split, cfg.T,
                                            second_order ? 1 : 0);
    const NLSPair& final_pair = limit.states.back();
    Field xi_final = Field::zero(grid);
    if (second_order) {
        const CorrectionTrajectory corr = solve_correction_cubic(limit, data, cfg.lambda, cfg.g0_variant, 0);
        xi_final = corr.states.back().xi1;
    }

    std::vector<std::vector<ResultRow>> slots(cfg.c_list.size());
    parallel_for_ordered(cfg.c_list.size(), [&](std::size_t i) {
        const auto start = clock_type::now();
        const double c = cfg.c_list[i];
        const KGParams params{c, cfg.lambda, 1};
        const auto ref = integrate_reference(first_order_initial(data, c), params, {cfg.tau_ref, cfg.T, 0});
        const Field z_ref = from_first_order(ref.back());
        const Field z0 = reconstruct_first_order(final_pair, c).z;
        const double e1 = l2_norm(z_ref - z0);

        ResultRow row = base_row(cfg);
        row.c = c;
        row.quantity = "z0_error";
        row.error_l2 = e1;
        row.value = e1;
        if (second_order) {
            const Field z2 = reconstruct_second_order_cubic(final_pair.u0, xi_final, cfg.T, c, cfg.lambda).z;
            const double e2 = l2_norm(z_ref - z2);
            row.runtime_s = seconds_since(start) / 2.0;
            slots[i].push_back(row);
            ResultRow row2 = row;
            row2.quantity = "z0_z1_error";
            row2.error_l2 = e2;
            row2.value = e2;
            slots[i].push_back(row2);
        } else {
            row.runtime_s = seconds_since(start);
            slots[i].push_back(row);
        }
    });

    std::vector<ResultRow> rows;
    for (auto& slot : slots)
        for (auto& row : slot) rows.push_back(std::move(row));
    fit_series_slope(rows, "z0_error", false);
    if (second_order) fit_series_slope(rows, "z0_z1_error", false);
    return rows;
}

std::vector<ResultRow> run_tau_convergence(const ExperimentConfig& cfg) {
    const GridPtr grid = make_grid(cfg.K);
    const InitialData data = build_initial_data(cfg.initial_data, grid);
    const NLSPair w0 = nls_initial(data);

    std::vector<ResultRow> slots(cfg.tau_list.size());
    parallel_for_ordered(cfg.tau_list.size(), [&](std::size_t i) {
        const auto start = clock_type::now();
        const double tau = cfg.tau_list[i];
        const auto coarse = solve_nls(w0, cfg.lambda, cfg.p, {tau, 4}, cfg.T, 0).states.back();
        const auto fine = solve_nls(w0, cfg.lambda, cfg.p, {tau / 64.0, 4}, cfg.T, 0).states.back();
        const double du = l2_norm(coarse.u0 - fine.u0);
        const double dv = l2_norm(coarse.v0 - fine.v0);
        ResultRow row = base_row(cfg);
        row.tau = tau;
        row.quantity = "strang_self_error";
        row.error_l2 = std::sqrt(du * du + dv * dv);
        row.value = *row.error_l2;
        row.runtime_s = seconds_since(start);
        slots[i] = std::move(row);
    });

    std::vector<ResultRow> rows(slots.begin(), slots.end());
    fit_series_slope(rows, "strang_self_error", true);
    return rows;
}

std::vector<ResultRow> run_conservation_study(const ExperimentConfig& cfg) {
    const GridPtr grid = make_grid(cfg.K);
    const InitialData data = build_initial_data(cfg.initial_data, grid);
    const KGParams base_params{cfg.reference_c, cfg.lambda, cfg.p};
    base_params.validate();

    std::vector<ResultRow> rows;
    auto push_quantity = [&](const std::string& name, double value, double c, double runtime) {
        ResultRow row = base_row(cfg);
        row.c = c;
        row.quantity = name;
        row.value = value;
        row.runtime_s = runtime;
        rows.push_back(row);
    };

    // Splitting trajectory of the limit system, stored at every step.
    auto start = clock_type::now();
    const LimitTrajectory limit = solve_nls(nls_initial(data), cfg.lambda, cfg.p, {cfg.tau, 4}, cfg.T, 1);
    const auto& states = limit.states;
    double q0_drift = 0.0, u_drift = 0.0, v_drift = 0.0;
    const double q0_0 = limit_charge(states.front());
    const double nu0 = l2_norm(states.front().u0);
    const double nv0 = l2_norm(states.front().v0);
    for (const auto& s : states) {
        q0_drift = std::max(q0_drift, std::abs(limit_charge(s) - q0_0));
        u_drift = std::max(u_drift, std::abs(l2_norm(s.u0) - nu0));
        v_drift = std::max(v_drift, std::abs(l2_norm(s.v0) - nv0));
    }
    const double traj_time = seconds_since(start);
    push_quantity("q0_drift", q0_drift, 0.0, traj_time);
    push_quantity("u0_norm_drift", u_drift, 0.0, 0.0);
    push_quantity("v0_norm_drift", v_drift, 0.0, 0.0);

    // First-order reconstructions: deviations of the exact functionals along
    // (u0 e^{i c^2 t}, v0 e^{i c^2 t}), per c.
    std::vector<std::vector<ResultRow>> slots(cfg.c_list.size());
    parallel_for_ordered(cfg.c_list.size(), [&](std::size_t i) {
        const auto t0 = clock_type::now();
        const double c = cfg.c_list[i];
        const KGParams params{c, cfg.lambda, cfg.p};
        double q_base = 0.0, e_base = 0.0, e0_base = 0.0;
        double q_dev = 0.0, e_dev = 0.0, e0_dev = 0.0, rest_mag = 0.0;
        for (std::size_t n = 0; n < states.size(); ++n) {
            const auto& s = states[n];
            const cplx phase = carrier_phase(c, s.t);
            const FirstOrderState phased{s.u0 * phase, s.v0 * phase, s.t};
            const double q = charge_uv(phased, c);
            const double e = energy_uv(phased, params);
            const double e0 = limit_energy(s, s.t, c, params);
            if (n == 0) {
                q_base = q;
                e_base = e;
                e0_base = e0;
            }
            q_dev = std::max(q_dev, std::abs(q - q_base));
            e_dev = std::max(e_dev, std::abs(e - e_base));
            e0_dev = std::max(e0_dev, std::abs(e0 - e0_base));
            // E - (E - rest) = the c^2-scaled mass part of the raw energy
            rest_mag = std::max(rest_mag, std::abs(rest_energy_split(phased, c, 1).rest));
        }
        const double elapsed = seconds_since(t0);
        ResultRow row = base_row(cfg);
        row.c = c;
        row.runtime_s = elapsed;
        auto add = [&](const std::string& name, double value) {
            ResultRow r = row;
            r.quantity = name;
            r.value = value;
            slots[i].push_back(r);
        };
        add("z0_charge_deviation", q_dev);
        add("e0_deviation", e0_dev);
        add("raw_energy_deviation", e_dev);
        add("rest_term_magnitude", rest_mag);
    });
    for (auto& slot : slots)
        for (auto& row : slot) rows.push_back(std::move(row));
    fit_series_slope(rows, "z0_charge_deviation", false);

    // Resolved reference leg: relative drift of the conserved functionals.
    start = clock_type::now();
    const std::size_t stride = std::max<std::size_t>(1, static_cast<std::size_t>(
        std::llround(cfg.reference_T / cfg.tau_ref)) / 100);
    const auto ref = integrate_reference(first_order_initial(data, cfg.reference_c), base_params,
                                         {cfg.tau_ref, cfg.reference_T, stride});
    const double q_ref0 = charge_uv(ref.front(), cfg.reference_c);
    const double e_ref0 = energy_uv(ref.front(), base_params);
    double q_ref_drift = 0.0, e_ref_drift = 0.0;
    for (const auto& s : ref) {
        q_ref_drift = std::max(q_ref_drift, std::abs(charge_uv(s, cfg.reference_c) - q_ref0));
        e_ref_drift = std::max(e_ref_drift, std::abs(energy_uv(s, base_params) - e_ref0));
    }
    const double ref_time = seconds_since(start);
    push_quantity("ref_charge_drift_rel", q_ref_drift / std::max(1.0, std::abs(q_ref0)), cfg.reference_c,
                  ref_time);
    push_quantity("ref_energy_drift_rel", e_ref_drift / std::abs(e_ref0), cfg.reference_c, 0.0);
    return rows;
}

}  // namespace

std::optional<double> ResultTable::series_slope(const std::string& quantity) const {
    for (const auto& row : rows)
        if (row.quantity == quantity && row.slope) return row.slope;
    return std::nullopt;
}

std::optional<double> ResultTable::quantity_value(const std::string& quantity,
                                                  std::optional<double> c) const {
    for (const auto& row : rows)
        if (row.quantity == quantity && (!c || row.c == *c)) return row.value;
    return std::nullopt;
}

ResultTable run_experiment(const ExperimentConfig& config) {
    config.validate();
    ResultTable table;
    table.experiment = experiment_name(config.experiment);
    switch (config.experiment) {
        case ExperimentKind::linear_convergence_in_c:
            table.rows = run_linear_convergence(config);
            break;
        case ExperimentKind::cubic_first_order_in_c:
            table.rows = run_cubic_convergence(config, false);
            break;
        case ExperimentKind::cubic_second_order_in_c:
            table.rows = run_cubic_convergence(config, true);
            break;
        case ExperimentKind::tau_convergence:
            table.rows = run_tau_convergence(config);
            break;
        case ExperimentKind::conservation_study:
            table.rows = run_conservation_study(config);
            break;
    }
    return table;
}

double fit_slope(std::span<const std::pair<double, double>> points) {
    if (points.size() < 3) throw parameter_error("slope fit needs at least 3 points");
    double sx = 0.0, sy = 0.0;
    for (const auto& [x, y] : points) {
        if (!(x > 0.0) || !(y > 0.0)) throw parameter_error("slope fit needs positive coordinates");
        sx += std::log(x);
        sy += std::log(y);
    }
    const double mx = sx / points.size(), my = sy / points.size();
    double num = 0.0, den = 0.0;
    for (const auto& [x, y] : points) {
        const double dx = std::log(x) - mx;
        num += dx * (std::log(y) - my);
        den += dx * dx;
    }
    if (den == 0.0) throw parameter_error("slope fit needs distinct abscissae");
    return num / den;
}

namespace {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string csv_cell(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

json row_to_json(const ResultRow& row) {
    json j;
    j["c"] = row.c;
    j["tau"] = row.tau;
    j["h"] = row.h;
    j["K"] = row.K;
    j["T"] = row.T;
    j["error_l2"] = row.error_l2 ? json(*row.error_l2) : json(nullptr);
    j["slope"] = row.slope ? json(*row.slope) : json(nullptr);
    j["quantity"] = row.quantity;
    j["value"] = row.value;
    j["runtime_s"] = row.runtime_s;
    return j;
}

}  // namespace

void write_outputs(const ResultTable& table, const ExperimentConfig& config) {
    if (table.rows.empty()) throw config_error("refusing to emit an empty result table");
    namespace fs = std::filesystem;
    const fs::path dir(config.output_dir.empty() ? "." : config.output_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (!fs::exists(dir)) throw config_error("cannot create output directory '" + dir.string() + "'");

    // results.csv
    {
        std::ofstream csv(dir / "results.csv");
        if (!csv) throw config_error("cannot write results.csv");
        csv << "experiment,c,tau,h,K,T,error_l2,slope,quantity,value,runtime_s\n";
        for (const auto& row : table.rows) {
            csv << table.experiment << ',' << format_double(row.c) << ',' << format_double(row.tau) << ','
                << format_double(row.h) << ',' << row.K << ',' << format_double(row.T) << ','
                << csv_cell(row.error_l2) << ',' << csv_cell(row.slope) << ',' << row.quantity << ','
                << format_double(row.value) << ',' << format_double(row.runtime_s) << '\n';
        }
    }

    // results.json
    {
        json j;
        j["experiment"] = table.experiment;
        j["rows"] = json::array();
        for (const auto& row : table.rows) j["rows"].push_back(row_to_json(row));
        std::ofstream out(dir / "results.json");
        if (!out) throw config_error("cannot write results.json");
        out << j.dump(2) << '\n';
    }

    // Per-series data files and a gnuplot script over them.
    const bool x_is_tau = config.experiment == ExperimentKind::tau_convergence;
    std::vector<std::string> series;
    for (const auto& row : table.rows) {
        const double x = x_is_tau ? row.tau : row.c;
        if (!(x > 0.0) || !(row.value > 0.0)) continue;
        if (std::find(series.begin(), series.end(), row.quantity) == series.end())
            series.push_back(row.quantity);
    }
    struct Anchor {
        double x, y, slope;
    };
    std::vector<std::pair<std::string, Anchor>> plotted;
    for (const auto& name : series) {
        std::vector<std::pair<double, double>> pts;
        std::optional<double> slope;
        for (const auto& row : table.rows) {
            if (row.quantity != name) continue;
            const double x = x_is_tau ? row.tau : row.c;
            if (!(x > 0.0) || !(row.value > 0.0)) continue;
            pts.emplace_back(x, row.value);
            if (row.slope) slope = row.slope;
        }
        if (pts.size() < 2) continue;
        std::ofstream dat(dir / ("series_" + name + ".dat"));
        if (!dat) throw config_error("cannot write series data file");
        for (const auto& [x, y] : pts) dat << format_double(x) << ' ' << format_double(y) << '\n';
        plotted.push_back({name, {pts.front().first, pts.front().second, slope.value_or(0.0)}});
    }

    std::ofstream gp(dir / "plot.gp");
    if (!gp) throw config_error("cannot write plot.gp");
    gp << "# gnuplot script generated alongside results.csv\n";
    gp << "set logscale xy\n";
    gp << "set xlabel \"" << (x_is_tau ? "tau" : "c") << "\"\n";
    gp << "set ylabel \"L2 error / quantity\"\n";
    gp << "set key outside\n";
    if (plotted.empty()) {
        gp << "# no positive series to plot\n";
        return;
    }
    gp << "plot ";
    bool first = true;
    for (const auto& [name, anchor] : plotted) {
        if (!first) gp << ", \\\n     ";
        first = false;
        gp << "\"series_" << name << ".dat\" using 1:2 with linespoints title \"" << name << "\"";
        if (anchor.slope != 0.0) {
            const double rounded = std::round(anchor.slope);
            gp << ", \\\n     " << format_double(anchor.y) << " * (x / " << format_double(anchor.x)
               << ")**(" << format_double(rounded) << ") with lines dashtype 2 title \"slope "
               << format_double(rounded) << "\"";
        }
    }
    gp << "\n";
}

}  // namespace kgnr
