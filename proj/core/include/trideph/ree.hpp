// ree.hpp
// Relative entropy of entanglement over the fully separable set: minimize
// S(rho || sigma) over convex mixtures of three-qubit product states by
// multistart alternating optimization (projected-descent weight updates on
// the convex objective, pattern-search refinement of the single-qubit
// factors on the Bloch parameterization).  The result is an upper bound on
// the true REE; deterministic for a fixed seed and options.

#pragma once

#include "trideph/dynamics.hpp"
#include "trideph/qstate.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace trideph {

struct ReeOptions {
    int terms = 32;            // product terms per candidate ensemble
    int restarts = 64;         // multistart count
    double tol = 1e-7;         // relative per-sweep improvement threshold
    int tol_window = 5;        // consecutive small sweeps before convergence
    int max_sweeps = 2000;
    std::uint64_t seed = 0;
    int threads = 0;           // 0 = hardware concurrency
    double epsilon = 1e-9;     // full-rank guard mixed into every candidate
};

/// One product term |a><a| (x) |b><b| (x) |c><c| of a separable mixture.
struct ProductTerm {
    std::array<Eigen::Vector2cd, 3> factors;
    CVector vector() const; // 8-component product vector
};

/// Convex mixture of product states (a fully separable candidate).
struct SeparableEnsemble {
    std::vector<double> weights;
    std::vector<ProductTerm> terms;
    DensityMatrix mixture() const;
};

struct EntanglementEstimate {
    double value = 0.0;            // nats; S(rho || mixture(sigma_star))
    SeparableEnsemble sigma_star;  // argmin found
    int restarts_used = 0;
    double residual = 0.0;         // improvement in the final sweep
    bool converged = false;
};

/// Relative entropy of entanglement estimate for a 3-qubit state.
EntanglementEstimate ree(const DensityMatrix& rho, const ReeOptions& opts = {});

/// The argmin separable ensemble of ree().
SeparableEnsemble closest_separable_state(const DensityMatrix& rho, const ReeOptions& opts = {});

struct TimeSeriesPoint {
    double gamma0_t = 0.0;
    double ree = 0.0;
    bool converged = true;
};

struct TimeSeries {
    std::vector<TimeSeriesPoint> points;
};

struct SeriesOptions {
    bool warm_start = true; // chain each solve from the previous argmin
    int threads = 0;        // parallel grid points when warm_start is off
};

/// Evolves rho0 under cfg and estimates the REE at each grid time (grid in
/// gamma0*t units, converted via the Markov rate of the first bath).  Warm
/// starting adds the previous argmin as an extra restart; fresh restarts
/// always run as well.
TimeSeries ree_time_series(const DensityMatrix& rho0, const EvolutionConfig& cfg,
                           std::span<const double> gamma0_times, const ReeOptions& opts = {},
                           const SeriesOptions& series = {});

} // namespace trideph
