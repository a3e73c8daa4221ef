#pragma once

#include "kgnr/kg_model.hpp"
#include "kgnr/limit_systems.hpp"

// Conserved and asymptotic physical quantities: the charge Q and energy E of
// the full flow (in (z, d_t z) and in (u, v) variables), the c-independent
// expansion leaders Q0 and E0 of the limit system, and the rest-energy split
// that removes the O(c^2) mass term from E.

namespace kgnr {

struct QuantityReport {
    std::string name;
    double value;
    double t = 0.0;
    double c = 0.0;
    double tau = 0.0;
};

// One CSV line "name,t,c,tau,value" with full-precision numbers.
std::string to_csv_row(const QuantityReport& report);
inline constexpr const char* quantity_csv_header = "name,t,c,tau,value";

// Q = integral of Re(-(i/c^2) d_t z * conj z).
double charge(const Field& z, const Field& zt, double c);

// E = integral of |c^{-1} d_t z|^2 + |grad z|^2 + |c z|^2
//     - (lambda/(p+1)) |z|^{2p+2}.
// The nonlinear term carries the lambda factor so that E is exactly invariant
// under the flow with f(z) = lambda |z|^{2p} z.
double energy(const Field& z, const Field& zt, const KGParams& params);

// The same functionals evaluated directly on (u, v) through the exact
// substitutions z = (u + conj v)/2, d_t z = (i c/2) <grad>_c (u - conj v),
// with the full Fourier symbol (no truncation in c).
double charge_uv(const FirstOrderState& state, double c);
double energy_uv(const FirstOrderState& state, const KGParams& params);

// Q0 = (|u0|_{L2}^2 - |v0|_{L2}^2) / 4: the c-independent charge leader,
// exactly conserved by the Strang splitting.
double limit_charge(const NLSPair& w);

// E0 = integral of (|grad u0|^2 + |grad v0|^2)/4
//      - (lambda/(p+1)) |(u0 + conj(v0) e^{-2 i c^2 t})/2|^{2p+2}.
double limit_energy(const NLSPair& w, double t, double c, const KGParams& params);

// Truncated single-component charges and the rest energy
//   Q_u = (1/4) sum_k T_N(k) |u_k|^2 * 2 pi,   T_N(k) = sum_{j<=N} s_j (k^2/c^2)^j
// with s_j the sqrt(1+x) Taylor coefficients, Q_v its negative-signed v
// counterpart, and rest = 2 c^2 (Q_u - Q_v). Subtracting `rest` from E leaves
// a quantity that stays O(1) as c grows. Truncation N in {0, 1}.
struct RestEnergySplit {
    double q_u;
    double q_v;
    double rest;
};
RestEnergySplit rest_energy_split(const FirstOrderState& state, double c, int truncation);

}  // namespace kgnr
