#pragma once

#include "kgnr/limit_systems.hpp"
#include "kgnr/spectral.hpp"

// Assemble approximations of z(t) from limit-system states by superposing the
// fast phases e^{+- i c^2 t}: the first-order term z0, the linear-case second
// term z1, and the fully discrete cubic second-order combination. The limit
// states are c-independent; only the phases depend on c.

namespace kgnr {

enum class ApproxOrder { first, second };

struct Approximation {
    Field z;
    ApproxOrder order;
    double t;
    double c;
};

// e^{i c^2 t} with the angle reduced modulo 2 pi first (c^2 t can reach 1e4
// at desk scale).
cplx carrier_phase(double c, double t);

// z0 = (u0 e^{i c^2 t} + conj(v0) e^{-i c^2 t}) / 2; uses the state's time.
Approximation reconstruct_first_order(const NLSPair& w, double c);

// Linear-case second term
//   z1 = (lambda/8)(u0 e^{i c^2 t} + conj(v0) e^{-i c^2 t})
//      + (1/2)(xi1 e^{i c^2 t} + conj(eta1) e^{-i c^2 t}).
Field reconstruct_linear_correction(const NLSPair& w, const CorrectionState& corr, double lambda, double c);

// Cubic real-data second-order combination z0 + c^{-2} z1 built from u0 and
// xi1 at a common time:
//   (1/2)(1 + c^{-2}(3 lambda/16)|u0|^2)(u0 e^{i c^2 t} + conj ...)
//   - (lambda/(64 c^2))(u0^3 e^{3 i c^2 t} + conj ...)
//   + (1/(2 c^2))(xi1 e^{i c^2 t} + conj ...).
Approximation reconstruct_second_order_cubic(const Field& u0, const Field& xi1, double t, double c,
                                             double lambda);

}  // namespace kgnr
