#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "kgnr/diagnostics.hpp"
#include "kgnr/limit_systems.hpp"

// Experiment orchestration: declarative configs, c-sweeps and tau-sweeps,
// error measurement against oracles and references, log-log slope fitting,
// and CSV/JSON/plot-script emission. Sweep points are independent and run
// in parallel (capped by KGNR_THREADS); results are gathered in declaration
// order so identical configs produce bit-identical outputs.

namespace kgnr {

enum class ExperimentKind {
    linear_convergence_in_c,
    cubic_first_order_in_c,
    cubic_second_order_in_c,
    tau_convergence,
    conservation_study,
};

std::string experiment_name(ExperimentKind kind);
ExperimentKind experiment_from_name(const std::string& name);
// (name, description) for every experiment kind.
std::vector<std::pair<std::string, std::string>> experiment_catalog();

struct ModeEntry {
    int k;
    cplx phi;
    cplx gamma;
};

struct InitialDataSpec {
    std::string preset;            // "trig_complex" | "trig_real" | "" when modes given
    std::vector<ModeEntry> modes;  // custom Fourier table
    bool normalize_h1 = false;     // divide phi, gamma by their H^1 norms
};

struct ExperimentConfig {
    ExperimentKind experiment = ExperimentKind::linear_convergence_in_c;
    int K = 32;
    double T = 0.1;
    double tau = 1e-3;
    double tau_ref = 1e-5;
    std::vector<double> c_list;
    std::vector<double> tau_list;  // tau_convergence sweep values
    double lambda = -1.0;
    int p = 1;
    InitialDataSpec initial_data;
    G0Variant g0_variant = G0Variant::coeff_3_16;
    std::string output_dir = ".";
    double reference_c = 8.0;  // conservation_study: c of the resolved reference leg
    double reference_T = 0.1;  // conservation_study: horizon of that leg

    void validate() const;
};

ExperimentConfig config_from_json_text(const std::string& text);
ExperimentConfig load_config(const std::string& path);

InitialData build_initial_data(const InitialDataSpec& spec, const GridPtr& grid);

struct ResultRow {
    double c = 0.0;
    double tau = 0.0;
    double h = 0.0;
    int K = 0;
    double T = 0.0;
    std::optional<double> error_l2;
    std::optional<double> slope;
    std::string quantity;  // series or quantity name
    double value = 0.0;
    double runtime_s = 0.0;
};

struct ResultTable {
    std::string experiment;
    std::vector<ResultRow> rows;

    // Signed log-log slope of an error series, if it was fitted.
    std::optional<double> series_slope(const std::string& quantity) const;
    // First row value carrying the given quantity name and (optionally) c.
    std::optional<double> quantity_value(const std::string& quantity,
                                         std::optional<double> c = std::nullopt) const;
};

ResultTable run_experiment(const ExperimentConfig& config);

// Least-squares slope of log y against log x. Needs >= 3 points, all
// positive.
double fit_slope(std::span<const std::pair<double, double>> points);

// results.csv, results.json, plot.gp and per-series data files under
// config.output_dir.
void write_outputs(const ResultTable& table, const ExperimentConfig& config);

// Trajectory snapshots as JSON: time stamp plus per-mode complex
// coefficients for each component. Round-trips exactly (numbers carry full
// precision).
std::string snapshot_to_json(const FirstOrderState& state);
std::string snapshot_to_json(const NLSPair& state);
FirstOrderState first_order_snapshot_from_json(const std::string& text, const GridPtr& grid);
NLSPair pair_snapshot_from_json(const std::string& text, const GridPtr& grid);

// Sweep parallelism: KGNR_THREADS if set, hardware concurrency otherwise.
int sweep_threads();

}  // namespace kgnr
