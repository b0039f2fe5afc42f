#pragma once

#include "gcs/types.hpp"

namespace gcs {

// Symplectic form Omega_n = blkdiag of n copies of [[0,1],[-1,0]].
// Satisfies Omega^T = -Omega, Omega^2 = -1, det Omega = 1.
RealMatrix symplectic_form(int n_modes);

// U_n = blkdiag of n copies of (1/sqrt(2)) [[1, i], [1, -i]], mapping the
// canonical operator vector (x_1, p_1, ...) to the ladder vector
// (a_1, a_1^dag, ...). Unitary.
ComplexMatrix ladder_transform(int n_modes);

// exp(tau * Omega * M) by scaling-and-squaring. Symplectic to machine
// precision when M is symmetric; for M = H + E with drift E it is the
// (non-symplectic) propagator of the damped flow.
RealMatrix symplectic_exp(const RealMatrix& m, Real tau);

// max |S Omega S^T - Omega|, zero for exactly symplectic S.
Real symplectic_defect(const RealMatrix& s);

}  // namespace gcs
