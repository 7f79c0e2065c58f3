#include <doctest.h>

#include "reference.hpp"

#include <trideph/dynamics.hpp>
#include <trideph/states.hpp>

#include <cmath>
#include <random>

using namespace trideph;
using testing::max_abs_diff;
using testing::random_density;

namespace {

const BathSpec kBath{}; // defaults: eta 0.1, Lambda 1e-2, kbt 1/(4pi)
constexpr double kTmax = 50.0;

const EvolutionConfig& config(BathTopology topo, MemoryKind mem) {
    static const EvolutionConfig lm =
        make_evolution_config(BathTopology::local, MemoryKind::markov, kBath, kTmax);
    static const EvolutionConfig ln =
        make_evolution_config(BathTopology::local, MemoryKind::non_markov, kBath, kTmax);
    static const EvolutionConfig cm =
        make_evolution_config(BathTopology::common, MemoryKind::markov, kBath, kTmax);
    static const EvolutionConfig cn =
        make_evolution_config(BathTopology::common, MemoryKind::non_markov, kBath, kTmax);
    if (topo == BathTopology::local)
        return mem == MemoryKind::markov ? lm : ln;
    return mem == MemoryKind::markov ? cm : cn;
}

const std::array<const EvolutionConfig*, 4> all_configs() {
    return {&config(BathTopology::local, MemoryKind::markov),
            &config(BathTopology::local, MemoryKind::non_markov),
            &config(BathTopology::common, MemoryKind::markov),
            &config(BathTopology::common, MemoryKind::non_markov)};
}

} // namespace

TEST_CASE("collective_sz: labels match the explicit collective spin matrix") {
    CMatrix z = CMatrix::Zero(2, 2);
    z(0, 0) = 1.0;
    z(1, 1) = -1.0;
    const CMatrix i2 = CMatrix::Identity(2, 2);
    const CMatrix sz = tensor(tensor(z, i2), i2) + tensor(tensor(i2, z), i2) +
                       tensor(tensor(i2, i2), z);
    for (int b = 0; b < 8; ++b)
        CHECK(std::abs(sz(b, b) - double(collective_sz(b, 3))) == 0.0);
    CHECK(collective_sz(0, 3) == 3);
    CHECK(collective_sz(7, 3) == -3);
    // Permutation invariance across same-weight basis states.
    CHECK(collective_sz(1, 3) == collective_sz(2, 3));
    CHECK(collective_sz(1, 3) == collective_sz(4, 3));
}

TEST_CASE("evolve: t = 0 is the identity and diagonals are fixed points") {
    std::mt19937_64 rng(101);
    const DensityMatrix rho = random_density(rng, 8);
    CMatrix diag = CMatrix::Zero(8, 8);
    for (int i = 0; i < 8; ++i)
        diag(i, i) = rho(i, i).real();
    diag /= diag.trace().real();
    const DensityMatrix rho_diag(std::move(diag));

    for (const auto* cfg : all_configs()) {
        CHECK(max_abs_diff(evolve(rho, *cfg, 0.0).matrix(), rho.matrix()) == 0.0);
        for (const double t : {5.0, 25.0, 50.0})
            CHECK(max_abs_diff(evolve(rho_diag, *cfg, t).matrix(), rho_diag.matrix()) < 1e-15);
    }
}

TEST_CASE("evolve_local: GHZ coherence follows exp(-6 Gamma)") {
    const DensityMatrix ghz = make_state({StateFamily::ghz});
    const auto& cfg = config(BathTopology::local, MemoryKind::non_markov);
    for (const double t : {5.0, 20.0, 50.0}) { // kernel grid points
        const DensityMatrix out = evolve_local(ghz, cfg, t);
        const double want = 0.5 * std::exp(-6.0 * cfg.kernels[0].Gamma_at(t));
        CHECK(std::abs(out(0, 7).real() - want) < 1e-14);
        CHECK(std::abs(out(0, 0).real() - 0.5) < 1e-15);
    }
}

TEST_CASE("evolve_common: sector structure of GHZ and WWbar") {
    const auto& cfg = config(BathTopology::common, MemoryKind::non_markov);
    const DensityMatrix ghz = make_state({StateFamily::ghz});
    const DensityMatrix wwbar = make_state({StateFamily::wwbar});
    for (const double t : {5.0, 20.0, 50.0}) {
        const double G = cfg.kernels[0].Gamma_at(t);
        // GHZ (0,7): |m - n| = 6 -> modulus exp(-18 Gamma).
        const DensityMatrix g_out = evolve_common(ghz, cfg, t);
        CHECK(std::abs(std::abs(g_out(0, 7)) - 0.5 * std::exp(-18.0 * G)) < 1e-14);
        // WWbar cross-sector (1,6): |m - n| = 2 -> modulus exp(-2 Gamma);
        // within-sector (1,2): untouched.
        const DensityMatrix w_out = evolve_common(wwbar, cfg, t);
        CHECK(std::abs(std::abs(w_out(1, 6)) - std::exp(-2.0 * G) / 6.0) < 1e-14);
        CHECK(std::abs(w_out(1, 2) - cplx(1.0 / 6.0, 0.0)) < 1e-15);
    }
}

TEST_CASE("evolve_common: W state is invariant (both memory kinds)") {
    const DensityMatrix w = make_state({StateFamily::w});
    for (const auto mem : {MemoryKind::markov, MemoryKind::non_markov}) {
        const auto& cfg = config(BathTopology::common, mem);
        for (const double t : {1.0, 10.0, 50.0})
            CHECK(max_abs_diff(evolve_common(w, cfg, t).matrix(), w.matrix()) < 1e-12);
    }
}

TEST_CASE("evolve vs evolve_ode: all four configurations agree") {
    std::mt19937_64 rng(103);
    std::vector<DensityMatrix> states;
    for (int i = 0; i < 5; ++i)
        states.push_back(random_density(rng, 8));

    for (const auto* cfg : all_configs()) {
        for (const double t : {10.0, 50.0}) { // kernel grid points
            const auto ode = evolve_ode(std::span<const DensityMatrix>(states), *cfg, t);
            for (std::size_t i = 0; i < states.size(); ++i) {
                const DensityMatrix closed = evolve(states[i], *cfg, t);
                CHECK(max_abs_diff(closed.matrix(), ode[i].matrix()) < 1e-8);
            }
        }
    }
}

TEST_CASE("evolve_ode: Markov populations stay constant") {
    std::mt19937_64 rng(107);
    const DensityMatrix rho = random_density(rng, 8);
    for (const auto topo : {BathTopology::local, BathTopology::common}) {
        const DensityMatrix out = evolve_ode(rho, config(topo, MemoryKind::markov), 20.0);
        for (int i = 0; i < 8; ++i)
            CHECK(std::abs(out(i, i) - rho(i, i)) < 1e-10);
    }
}

TEST_CASE("evolve: Markov semigroup composition") {
    std::mt19937_64 rng(109);
    const DensityMatrix rho = random_density(rng, 8);
    for (const auto topo : {BathTopology::local, BathTopology::common}) {
        const auto& cfg = config(topo, MemoryKind::markov);
        const DensityMatrix two_leg = evolve(evolve(rho, cfg, 7.0), cfg, 13.0);
        const DensityMatrix direct = evolve(rho, cfg, 20.0);
        CHECK(max_abs_diff(two_leg.matrix(), direct.matrix()) < 1e-10);
    }
}

TEST_CASE("evolve: coherence moduli are monotone non-increasing") {
    std::mt19937_64 rng(113);
    const DensityMatrix rho = random_density(rng, 8);
    for (const auto* cfg : all_configs()) {
        CMatrix prev = rho.matrix();
        for (const double t : {2.0, 5.0, 10.0, 20.0, 35.0, 50.0}) {
            const CMatrix cur = evolve(rho, *cfg, t).matrix();
            for (int r = 0; r < 8; ++r)
                for (int c = 0; c < 8; ++c)
                    CHECK(std::abs(cur(r, c)) <= std::abs(prev(r, c)) + 1e-14);
            prev = cur;
        }
    }
}

TEST_CASE("evolve: physicality preserved on random states") {
    std::mt19937_64 rng(127);
    for (const auto* cfg : all_configs()) {
        for (int rep = 0; rep < 50; ++rep) {
            const DensityMatrix rho = random_density(rng, 8);
            // Constructor re-checks Hermiticity and trace at 1e-12.
            const DensityMatrix out = evolve(rho, *cfg, 0.7 * kTmax);
            CHECK(out.min_eigenvalue() >= -1e-10);
        }
    }
}

TEST_CASE("evolve_local: uniform-bath decay depends only on Hamming distance") {
    // A uniform-superposition pure state has all-equal entries, so the
    // propagated entries expose the decay factors directly.
    CVector plus = CVector::Constant(8, cplx(1.0 / std::sqrt(8.0), 0.0));
    const DensityMatrix rho = DensityMatrix::pure(StateVector(plus));
    const auto& cfg = config(BathTopology::local, MemoryKind::markov);
    const CMatrix out = evolve_local(rho, cfg, 6.0).matrix();
    for (int r = 0; r < 8; ++r)
        for (int c = 0; c < 8; ++c) {
            const int dist = __builtin_popcount(unsigned(r ^ c));
            const double want = std::exp(-2.0 * dist * markov_rate(kBath) * 6.0) / 8.0;
            CHECK(std::abs(std::abs(out(r, c)) - want) < 1e-14);
        }
}

TEST_CASE("evolve: argument and range validation") {
    const DensityMatrix ghz = make_state({StateFamily::ghz});
    CHECK_THROWS_AS(
        evolve_local(ghz, config(BathTopology::common, MemoryKind::markov), 1.0),
        std::invalid_argument);
    CHECK_THROWS_AS(
        evolve_common(ghz, config(BathTopology::local, MemoryKind::markov), 1.0),
        std::invalid_argument);
    // Beyond the tabulated kernel range.
    CHECK_THROWS_AS(
        evolve_local(ghz, config(BathTopology::local, MemoryKind::non_markov), kTmax + 1.0),
        std::out_of_range);
    CHECK_THROWS_AS(evolve(ghz, config(BathTopology::local, MemoryKind::markov), -1.0),
                    std::invalid_argument);
}

TEST_CASE("evolve_ode: oversized steps are detected as instability") {
    const DensityMatrix ghz = make_state({StateFamily::ghz});
    OdeOptions opts;
    opts.max_step = 2.0;
    CHECK_THROWS_AS(evolve_ode(ghz, config(BathTopology::common, MemoryKind::markov), 20.0, opts),
                    std::runtime_error);
}

TEST_CASE("make_evolution_config: kernel counts per topology") {
    const auto& local = config(BathTopology::local, MemoryKind::non_markov);
    CHECK(local.baths.size() == 3);
    CHECK(local.kernels.size() == 3);
    const auto& common = config(BathTopology::common, MemoryKind::non_markov);
    CHECK(common.baths.size() == 1);
    CHECK(common.kernels.size() == 1);
    CHECK_THROWS_AS(make_evolution_config(BathTopology::local, MemoryKind::markov,
                                          std::vector<BathSpec>{kBath}, kTmax),
                    std::invalid_argument);
}
