#pragma once

#include <utility>
#include <vector>

#include "kgnr/spectral.hpp"

// The Klein-Gordon model in the weakly relativistic scaling
//
//     (1/c^2) d_tt z - Laplace z + c^2 z = f(z),   f(z) = lambda |z|^{2p} z,
//     z(0) = phi,  d_t z(0) = c^2 gamma,
//
// on the torus: its first-order reformulation in the variables (u, v), the
// nonlinearity vector, the initial-data expansion in powers of c^{-2}, the
// exact solution of the linear problem, and a highly resolved reference
// integrator for the full oscillatory system.

namespace kgnr {

struct KGParams {
    double c;       // speed-of-light parameter, > 0
    double lambda;  // nonlinearity strength
    int p;          // nonlinearity degree: f(z) = lambda |z|^{2p} z

    void validate() const;
};

struct InitialData {
    Field phi;    // z(0)
    Field gamma;  // d_t z(0) = c^2 * gamma; both fields independent of c
};

// The pair w = (u, v) with u = z - i c^{-1}<grad>_c^{-1} d_t z and
// v = conj(z) - i c^{-1}<grad>_c^{-1} d_t conj(z). If z is real, u = v.
struct FirstOrderState {
    Field u;
    Field v;
    double t = 0.0;
};

FirstOrderState to_first_order(const Field& z, const Field& zt, double c);
Field from_first_order(const FirstOrderState& state);

// The (u, v) state at t = 0 determined by (phi, gamma).
FirstOrderState first_order_initial(const InitialData& data, double c);

// lambda |z|^{2p} z, evaluated pointwise on grid values (p = 0: lambda z).
Field nonlinearity(const Field& z, double lambda, int p, DealiasRule dealias = DealiasRule::none);

// F(w) = ( f((u + conj v)/2), f((conj u + v)/2) ); second component is the
// conjugate of the first because f is real.
std::pair<Field, Field> nonlinear_pair(const FirstOrderState& state, double lambda, int p);

// Term n of the initial-data expansion psi = sum_n c^{-2n} psi_n:
//   psi_0 = (phi - i gamma, conj(phi + i gamma)),
//   psi_1 = -(i/2) Laplace (gamma, conj gamma).
// Only n in {0, 1} is constructed.
std::pair<Field, Field> psi_expansion_term(int n, const InitialData& data);

// Taylor coefficients of sqrt(1+x) (kind sqrt, the dispersion expansion) and
// of (1+x)^{-1/2} (kind inv_sqrt, the smoothing-operator expansion).
enum class SeriesKind { sqrt, inv_sqrt };
double series_coefficient(SeriesKind kind, int n);

// Exact solution of the linear problem (p = 0) per Fourier mode a:
//   z_a(t) = phi_a cos(c t W_a) + (c/W_a) gamma_a sin(c t W_a),
//   W_a = sqrt(a^2 + c^2 - lambda).
// Requires a^2 + c^2 - lambda > 0 for every mode on the grid.
Field exact_linear_solution(const InitialData& data, const KGParams& params, double t);
Field exact_linear_time_derivative(const InitialData& data, const KGParams& params, double t);

// Reference integration of the full first-order system
//   i d_t w = -c <grad>_c w + c <grad>_c^{-1} F(w)
// using the exact diagonal flow as an integrating factor and classical RK4 on
// the twisted unknowns. Refuses to run unless tau * c^2 <= 0.1, so that the
// phase e^{i t c <grad>_c} is resolved. snapshot_stride = 0 stores only the
// first and last states.
struct ReferenceOptions {
    double tau;
    double T;
    std::size_t snapshot_stride = 0;
};

std::vector<FirstOrderState> integrate_reference(const FirstOrderState& psi, const KGParams& params,
                                                 const ReferenceOptions& options);

}  // namespace kgnr
