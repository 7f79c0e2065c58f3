#include <doctest.h>

#include "reference.hpp"

#include <trideph/qstate.hpp>
#include <trideph/states.hpp>

#include <cmath>
#include <random>

using namespace trideph;
using testing::max_abs_diff;
using testing::random_qubit;

namespace {

// 8x8 permutation matrix relabeling the three qubits.
CMatrix qubit_permutation(const std::array<int, 3>& perm) {
    CMatrix p = CMatrix::Zero(8, 8);
    for (int b = 0; b < 8; ++b) {
        int target = 0;
        for (int q = 0; q < 3; ++q) {
            const int bit = (b >> (2 - q)) & 1;
            target |= bit << (2 - perm[q]);
        }
        p(target, b) = 1.0;
    }
    return p;
}

} // namespace

TEST_CASE("make_state: GHZ amplitudes") {
    const StateVector ghz = make_state_vector(StateFamily::ghz);
    const double s2 = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(ghz[0] - s2) < 1e-15);
    CHECK(std::abs(ghz[7] - s2) < 1e-15);
    for (int i = 1; i < 7; ++i)
        CHECK(std::abs(ghz[i]) == 0.0);
}

TEST_CASE("make_state: Werner endpoints") {
    const DensityMatrix pure = make_state({StateFamily::werner_ghz, 1.0});
    const DensityMatrix ghz = make_state({StateFamily::ghz});
    CHECK(max_abs_diff(pure.matrix(), ghz.matrix()) < 1e-15);

    const DensityMatrix noise = make_state({StateFamily::werner_ghz, 0.0});
    CHECK(max_abs_diff(noise.matrix(), CMatrix::Identity(8, 8) / 8.0) < 1e-15);
}

TEST_CASE("make_state: W and Wbar are orthogonal, WWbar is normalized") {
    const CVector w = make_state_vector(StateFamily::w).amplitudes();
    const CVector wbar = make_state_vector(StateFamily::wbar).amplitudes();
    CHECK(std::abs(cplx(w.adjoint() * wbar)) == 0.0);

    const CVector wwbar = make_state_vector(StateFamily::wwbar).amplitudes();
    CHECK(std::abs(wwbar.squaredNorm() - 1.0) < 1e-15);
    const CVector sum = ((w + wbar) / std::sqrt(2.0));
    CHECK((wwbar - sum).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("make_state: outputs satisfy density-matrix invariants") {
    const NamedState all[] = {
        {StateFamily::ghz},           {StateFamily::w},
        {StateFamily::wbar},          {StateFamily::wwbar},
        {StateFamily::star},          {StateFamily::werner_ghz, 0.3},
        {StateFamily::werner_w, 0.7}, {StateFamily::ghz_w_mix, 0.5},
    };
    for (const auto& s : all) {
        const DensityMatrix rho = make_state(s); // constructor checks herm/trace
        rho.validate_psd();
    }
}

TEST_CASE("make_state: rejects p outside [0, 1]") {
    CHECK_THROWS_AS(make_state({StateFamily::werner_ghz, -0.1}), std::invalid_argument);
    CHECK_THROWS_AS(make_state({StateFamily::werner_w, 1.1}), std::invalid_argument);
}

TEST_CASE("parse_named_state: vocabulary round-trip") {
    for (const char* tok :
         {"ghz", "w", "wbar", "wwbar", "star", "werner-ghz:0.5", "werner-w:0.1", "ghzw:0.9"}) {
        const NamedState s = parse_named_state(tok);
        CHECK(to_string(s) == tok);
    }
    CHECK_THROWS_AS(parse_named_state("bell"), std::invalid_argument);
    CHECK_THROWS_AS(parse_named_state("werner-ghz"), std::invalid_argument);
    CHECK_THROWS_AS(parse_named_state("werner-ghz:1.5"), std::invalid_argument);
    CHECK_THROWS_AS(parse_named_state("ghz:0.5"), std::invalid_argument);
    CHECK_THROWS_AS(parse_named_state("werner-w:abc"), std::invalid_argument);
}

TEST_CASE("concurrence: Bell state is maximal") {
    CVector bell = CVector::Zero(4);
    bell(0) = 1.0 / std::sqrt(2.0);
    bell(3) = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(concurrence(DensityMatrix::pure(StateVector(bell))) - 1.0) < 1e-12);
}

TEST_CASE("concurrence: WWbar reduced two-qubit value is 1/3") {
    const DensityMatrix wwbar = make_state({StateFamily::wwbar});
    for (const auto& keep : {std::vector<int>{0, 1}, {0, 2}, {1, 2}}) {
        const double c = concurrence(partial_trace(wwbar, keep));
        CHECK(std::abs(c - 1.0 / 3.0) < 1e-10);
    }
}

TEST_CASE("concurrence: Star pair fingerprints (1/2, 1/2, 0)") {
    const DensityMatrix star = make_state({StateFamily::star});
    const double c_ac = concurrence(partial_trace(star, {0, 2}));
    const double c_bc = concurrence(partial_trace(star, {1, 2}));
    const double c_ab = concurrence(partial_trace(star, {0, 1}));
    CHECK(std::abs(c_ac - 0.5) < 1e-10);
    CHECK(std::abs(c_bc - 0.5) < 1e-10);
    CHECK(std::abs(c_ab) < 1e-10);
}

TEST_CASE("concurrence: invariant under local unitaries") {
    std::mt19937_64 rng(41);
    const DensityMatrix wwbar = make_state({StateFamily::wwbar});
    const DensityMatrix red = partial_trace(wwbar, {0, 1});
    const double base = concurrence(red);
    for (int rep = 0; rep < 25; ++rep) {
        const CMatrix u = tensor(testing::random_unitary(rng, 2), CMatrix::Identity(2, 2));
        const CMatrix v = tensor(CMatrix::Identity(2, 2), testing::random_unitary(rng, 2));
        const DensityMatrix rot(CMatrix(v * u * red.matrix() * u.adjoint() * v.adjoint()));
        CHECK(std::abs(concurrence(rot) - base) < 1e-10);
    }
}

TEST_CASE("concurrence: wrong dimension throws") {
    CHECK_THROWS_AS(concurrence(make_state({StateFamily::ghz})), std::invalid_argument);
}

TEST_CASE("three_tangle_pure: fingerprints of the named states") {
    CHECK(std::abs(three_tangle_pure(make_state_vector(StateFamily::w))) < 1e-10);
    CHECK(std::abs(three_tangle_pure(make_state_vector(StateFamily::wwbar)) - 1.0 / 3.0) < 1e-10);
    CHECK(std::abs(three_tangle_pure(make_state_vector(StateFamily::star)) - 0.25) < 1e-10);
    CHECK(std::abs(three_tangle_pure(make_state_vector(StateFamily::ghz)) - 1.0) < 1e-10);
}

TEST_CASE("three_tangle_pure: invariant under local unitaries") {
    std::mt19937_64 rng(43);
    for (const StateFamily fam : {StateFamily::ghz, StateFamily::wwbar, StateFamily::star}) {
        const CVector psi = make_state_vector(fam).amplitudes();
        const double base = three_tangle_pure(StateVector(psi));
        for (int rep = 0; rep < 200; ++rep) {
            const CMatrix u = tensor(tensor(testing::random_unitary(rng, 2),
                                            testing::random_unitary(rng, 2)),
                                     testing::random_unitary(rng, 2));
            CVector rotated = u * psi;
            rotated /= rotated.norm();
            CHECK(std::abs(three_tangle_pure(StateVector(rotated)) - base) < 1e-10);
        }
    }
}

TEST_CASE("three_tangle_pure: input validation") {
    CVector four = CVector::Zero(4);
    four(0) = 1.0;
    CHECK_THROWS_AS(three_tangle_pure(StateVector(four)), std::invalid_argument);
}

TEST_CASE("Werner states are permutation symmetric") {
    const std::array<std::array<int, 3>, 6> perms{
        {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
    for (const double p : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        for (const auto fam : {StateFamily::werner_ghz, StateFamily::werner_w}) {
            const DensityMatrix rho = make_state({fam, p});
            for (const auto& perm : perms) {
                const CMatrix pm = qubit_permutation(perm);
                CHECK(max_abs_diff(pm * rho.matrix() * pm.adjoint(), rho.matrix()) < 1e-14);
            }
        }
    }
}

TEST_CASE("product state construction sanity") {
    std::mt19937_64 rng(47);
    const CVector p = testing::random_product3(rng);
    CHECK(std::abs(p.squaredNorm() - 1.0) < 1e-12);
    CHECK(std::abs(three_tangle_pure(StateVector(p))) < 1e-12);
}
