// Test-only oracles, independent of the library's production paths:
// a separate adaptive quadrature scheme for the bath-rate integrals,
// random-state generators, and small helpers shared across suites.

#pragma once

#include <trideph/bath.hpp>
#include <trideph/qstate.hpp>

#include <random>

namespace trideph::testing {

/// Reference dephasing rate: adaptive Boole-rule panels over the
/// frequency integrand (distinct scheme from the library's Simpson).
double ref_gamma(double t, const BathSpec& spec);

/// Reference cumulative integral int_0^t gamma(s) ds by nested adaptive
/// quadrature (outer time integral over the reference rate).
double ref_gamma_integral(double t, const BathSpec& spec);

/// Closed forms for the imaginary parts (elementary integrals of the
/// Ohmic cutoff): Im alpha(t) = -eta L (Lt)^2 / (1 + (Lt)^2) and
/// Im A(t) = -eta (Lt - atan(Lt)).
double ref_im_alpha(double t, const BathSpec& spec);
double ref_im_A(double t, const BathSpec& spec);

/// Full-rank random density matrix (normalized Wishart).
DensityMatrix random_density(std::mt19937_64& rng, int dim);

/// Haar-like random unitary via QR of a Gaussian matrix.
CMatrix random_unitary(std::mt19937_64& rng, int dim);

/// Random single-qubit pure state.
CVector random_qubit(std::mt19937_64& rng);

/// Random 3-qubit product pure state vector.
CVector random_product3(std::mt19937_64& rng);

inline double max_abs_diff(const CMatrix& a, const CMatrix& b) {
    return (a - b).cwiseAbs().maxCoeff();
}

} // namespace trideph::testing
