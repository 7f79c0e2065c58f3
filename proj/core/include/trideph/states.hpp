// states.hpp
// The three-qubit initial states used by the experiments, plus the static
// entanglement fingerprints: Wootters concurrence for two-qubit reductions
// and the pure-state three-tangle.

#pragma once

#include "trideph/qstate.hpp"

#include <string>
#include <string_view>

namespace trideph {

enum class StateFamily { ghz, w, wbar, wwbar, star, werner_ghz, werner_w, ghz_w_mix };

/// A named initial state; p is the mixing probability for the Werner-type
/// and GHZ-W families and is ignored for the pure families.
struct NamedState {
    StateFamily family = StateFamily::ghz;
    double p = 1.0;
};

bool is_pure_family(StateFamily family);

/// CLI vocabulary: ghz, w, wbar, wwbar, star, werner-ghz:p, werner-w:p,
/// ghzw:p.  Throws std::invalid_argument on unknown tokens or p outside
/// [0, 1].
NamedState parse_named_state(std::string_view token);
std::string to_string(const NamedState& state);

/// Pure state vector for the pure families (throws for mixed families).
StateVector make_state_vector(StateFamily family);

/// Density matrix for any named state.
DensityMatrix make_state(const NamedState& state);

/// Wootters concurrence of a two-qubit state,
/// max(0, l1 - l2 - l3 - l4) over the descending square-rooted eigenvalues
/// of rho (sy x sy) rho* (sy x sy).  Throws unless dim = 4.
double concurrence(const DensityMatrix& rho2);

/// Three-tangle of a pure 3-qubit state (Coffman-Kundu-Wootters residual
/// entanglement, via the degree-4 hyperdeterminant).  Throws unless
/// dim = 8.
double three_tangle_pure(const StateVector& psi);

} // namespace trideph
