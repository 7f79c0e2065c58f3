// qstate.hpp
// Dense complex linear algebra for multi-qubit registers: state vectors,
// density matrices, tensor composition, partial trace and entropic
// functionals.
//
// Basis convention: computational basis |b1 b2 ... bn> with qubit 0 the
// most significant bit, index(|b1...bn>) = sum_i b_i 2^(n-1-i).  The
// sigma_z eigenvalue is +1 for |0> and -1 for |1>.  Entropies are in nats.

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <vector>

namespace trideph {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

// Numerical tolerances shared across the library.
inline constexpr double kNormTol = 1e-12;   // state vector normalization
inline constexpr double kHermTol = 1e-12;   // entrywise Hermiticity
inline constexpr double kTraceTol = 1e-12;  // |tr(rho) - 1|
inline constexpr double kEigFloor = -1e-10; // eigenvalues above this are clipped to 0
inline constexpr double kSupportEigTol = 1e-12; // sigma eigenvalue treated as zero
inline constexpr double kSupportWeightTol = 1e-10; // rho weight that breaks support

/// Normalized pure state on n qubits (dim = 2^n).
class StateVector {
public:
    explicit StateVector(CVector amplitudes);

    Eigen::Index dim() const { return amps_.size(); }
    int qubits() const { return qubits_; }
    const CVector& amplitudes() const { return amps_; }
    cplx operator[](Eigen::Index i) const { return amps_(i); }

private:
    CVector amps_;
    int qubits_ = 0;
};

/// Hermitian, unit-trace operator on n qubits.  Construction checks
/// squareness, power-of-two dimension, Hermiticity and trace; positivity
/// is checked on demand (validate_psd) since it needs a spectral
/// decomposition.
class DensityMatrix {
public:
    explicit DensityMatrix(CMatrix entries);
    static DensityMatrix pure(const StateVector& psi);

    Eigen::Index dim() const { return m_.rows(); }
    int qubits() const { return qubits_; }
    const CMatrix& matrix() const { return m_; }
    cplx operator()(Eigen::Index r, Eigen::Index c) const { return m_(r, c); }

    /// Smallest eigenvalue (for positivity checks).
    double min_eigenvalue() const;
    /// Throws if any eigenvalue falls below the clip floor.
    void validate_psd() const;

private:
    CMatrix m_;
    int qubits_ = 0;
};

/// Kronecker product in the basis convention above (a acts on the more
/// significant qubits).  Throws on non-square input.
CMatrix tensor(const CMatrix& a, const CMatrix& b);
CVector tensor(const CVector& a, const CVector& b);
DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b);

/// Reduce to the qubits in `keep` (0-based, qubit 0 = most significant);
/// the kept qubits retain their relative order.  Throws on an empty set or
/// an out-of-range index.
DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<int>& keep);

/// Von Neumann entropy S(rho) = -tr(rho ln rho) in nats, with 0 ln 0 = 0.
/// Eigenvalues in (kEigFloor, 0) are clipped to zero; anything lower throws.
double von_neumann_entropy(const DensityMatrix& rho);

/// Quantum relative entropy S(rho||sigma) = tr{rho(ln rho - ln sigma)} in
/// nats.  Returns +infinity when the support of rho is not contained in
/// the support of sigma.  Throws on dimension mismatch.
double relative_entropy(const DensityMatrix& rho, const DensityMatrix& sigma);

} // namespace trideph
