// dynamics.hpp
// Propagation of a 3-qubit density matrix under pure dephasing, for the
// four bath configurations: {local, common} x {Markov, non-Markov}.
//
// Pure dephasing is diagonal in the computational basis, so the production
// propagators are exact element-wise maps:
//   local:  rho_bb'(t) = rho_bb'(0) exp(-2 sum_{i: b_i != b'_i} Gamma_i(t))
//   common: rho_bb'(t) = rho_bb'(0) exp(-(m-n)^2 Gamma(t)/2
//                                       + i Im A(t) (n^2 - m^2))
// with m, n the collective sigma_z eigenvalues of the two basis states and
// Gamma, A the cumulative bath integrals (Markov mode: Gamma(t) = gamma0 t,
// zero phase).  A classical fixed-step RK4 integrator of the same master
// equations is provided as an independent oracle for tests.

#pragma once

#include "trideph/bath.hpp"
#include "trideph/qstate.hpp"

#include <span>
#include <vector>

namespace trideph {

/// Bath wiring for one propagation: per-qubit baths with per-qubit kernels
/// (local) or one shared bath and kernel (common).  Markov mode carries no
/// kernels; the constant-rate integrals are used directly.
struct EvolutionConfig {
    BathTopology topology = BathTopology::local;
    MemoryKind memory = MemoryKind::markov;
    std::vector<BathSpec> baths;          // size 3 (local) or 1 (common)
    std::vector<DephasingKernel> kernels; // non-Markov only, same size as baths
};

/// Uniform baths across qubits (the default assumption); kernels are built
/// here for non-Markov memory.
EvolutionConfig make_evolution_config(BathTopology topology, MemoryKind memory,
                                      const BathSpec& bath, double t_max,
                                      int kernel_steps = 500);

/// Per-qubit bath overrides for the local topology (3 entries).
EvolutionConfig make_evolution_config(BathTopology topology, MemoryKind memory,
                                      std::vector<BathSpec> baths, double t_max,
                                      int kernel_steps = 500);

/// Collective sigma_z eigenvalue m(b) = sum_i s_i of a basis state
/// (s = +1 for bit 0, -1 for bit 1); m(|000>) = 3, m(|111>) = -3.
int collective_sz(unsigned basis_index, int n_qubits);

/// Closed-form local-dephasing propagator.  Throws if the config topology
/// does not match or t is outside the tabulated kernel range.
DensityMatrix evolve_local(const DensityMatrix& rho0, const EvolutionConfig& cfg, double t);

/// Closed-form common-dephasing propagator (same error contract).
DensityMatrix evolve_common(const DensityMatrix& rho0, const EvolutionConfig& cfg, double t);

/// Dispatches on cfg.topology.
DensityMatrix evolve(const DensityMatrix& rho0, const EvolutionConfig& cfg, double t);

struct OdeOptions {
    double max_step = 1e-2;  // integration step bound (units 1/omega0)
    double trace_tol = 1e-6; // instability threshold on |tr - 1|
};

/// Fixed-step classical RK4 integration of the master equation itself
/// (test oracle; rates evaluated by direct quadrature, not from kernels).
/// Throws on detected step-size instability.
DensityMatrix evolve_ode(const DensityMatrix& rho0, const EvolutionConfig& cfg, double t,
                         const OdeOptions& opts = {});

/// Batch variant sharing the rate quadratures across initial states.
std::vector<DensityMatrix> evolve_ode(std::span<const DensityMatrix> rho0s,
                                      const EvolutionConfig& cfg, double t,
                                      const OdeOptions& opts = {});

} // namespace trideph
