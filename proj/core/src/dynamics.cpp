#include "trideph/dynamics.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace trideph {

namespace {

void check_config(const EvolutionConfig& cfg) {
    const std::size_t want = cfg.topology == BathTopology::local ? 3 : 1;
    if (cfg.baths.size() != want)
        throw std::invalid_argument("EvolutionConfig: wrong bath count for topology");
    if (cfg.memory == MemoryKind::non_markov && cfg.kernels.size() != want)
        throw std::invalid_argument("EvolutionConfig: wrong kernel count for topology");
}

void check_three_qubits(const DensityMatrix& rho) {
    if (rho.qubits() != 3)
        throw std::invalid_argument("evolve: propagators expect a 3-qubit state");
}

} // namespace

EvolutionConfig make_evolution_config(BathTopology topology, MemoryKind memory,
                                      const BathSpec& bath, double t_max, int kernel_steps) {
    const std::size_t count = topology == BathTopology::local ? 3 : 1;
    EvolutionConfig cfg;
    cfg.topology = topology;
    cfg.memory = memory;
    cfg.baths.assign(count, bath);
    cfg.baths[0].topology = topology;
    for (auto& b : cfg.baths)
        b.topology = topology;
    if (memory == MemoryKind::non_markov) {
        // Uniform baths share one tabulation.
        const DephasingKernel kernel = build_kernel(bath, t_max, kernel_steps);
        cfg.kernels.assign(count, kernel);
    }
    return cfg;
}

EvolutionConfig make_evolution_config(BathTopology topology, MemoryKind memory,
                                      std::vector<BathSpec> baths, double t_max,
                                      int kernel_steps) {
    const std::size_t count = topology == BathTopology::local ? 3 : 1;
    if (baths.size() != count)
        throw std::invalid_argument("make_evolution_config: need one bath per qubit (local) "
                                    "or a single shared bath (common)");
    EvolutionConfig cfg;
    cfg.topology = topology;
    cfg.memory = memory;
    cfg.baths = std::move(baths);
    for (auto& b : cfg.baths)
        b.topology = topology;
    if (memory == MemoryKind::non_markov)
        for (const auto& b : cfg.baths)
            cfg.kernels.push_back(build_kernel(b, t_max, kernel_steps));
    return cfg;
}

int collective_sz(unsigned basis_index, int n_qubits) {
    int m = 0;
    for (int q = 0; q < n_qubits; ++q)
        m += (basis_index >> q) & 1u ? -1 : 1;
    return m;
}

DensityMatrix evolve_local(const DensityMatrix& rho0, const EvolutionConfig& cfg, double t) {
    check_config(cfg);
    check_three_qubits(rho0);
    if (cfg.topology != BathTopology::local)
        throw std::invalid_argument("evolve_local: config topology is not local");
    if (t < 0.0)
        throw std::invalid_argument("evolve_local: t must be >= 0");

    // Per-qubit integrated rates; qubit q sits at bit (2 - q).
    double G[3];
    for (int q = 0; q < 3; ++q)
        G[q] = cfg.memory == MemoryKind::markov ? markov_rate(cfg.baths[q]) * t
                                                : cfg.kernels[q].Gamma_at(t);

    CMatrix out(8, 8);
    const CMatrix& m = rho0.matrix();
    for (int r = 0; r < 8; ++r)
        for (int c = 0; c < 8; ++c) {
            double expo = 0.0;
            for (int q = 0; q < 3; ++q) {
                const int bit = 2 - q;
                if (((r >> bit) & 1) != ((c >> bit) & 1))
                    expo += G[q];
            }
            out(r, c) = m(r, c) * std::exp(-2.0 * expo);
        }
    return DensityMatrix(std::move(out));
}

DensityMatrix evolve_common(const DensityMatrix& rho0, const EvolutionConfig& cfg, double t) {
    check_config(cfg);
    check_three_qubits(rho0);
    if (cfg.topology != BathTopology::common)
        throw std::invalid_argument("evolve_common: config topology is not common");
    if (t < 0.0)
        throw std::invalid_argument("evolve_common: t must be >= 0");

    double Gamma;
    double imA = 0.0;
    if (cfg.memory == MemoryKind::markov) {
        Gamma = markov_rate(cfg.baths[0]) * t;
    } else {
        Gamma = cfg.kernels[0].Gamma_at(t);
        imA = cfg.kernels[0].A_at(t).imag();
    }

    // Element-wise map in the collective-sz labeling; with Re A = Gamma/2
    // the modulus is exp(-(m-n)^2 Gamma/2) and the phase exp(i ImA (n^2-m^2)).
    // The reduced form keeps populations exactly constant.
    int mz[8];
    for (int b = 0; b < 8; ++b)
        mz[b] = collective_sz(static_cast<unsigned>(b), 3);

    CMatrix out(8, 8);
    const CMatrix& m = rho0.matrix();
    for (int r = 0; r < 8; ++r)
        for (int c = 0; c < 8; ++c) {
            const double d = mz[r] - mz[c];
            const double mag = std::exp(-0.5 * d * d * Gamma);
            const double phase = imA * (mz[c] * mz[c] - mz[r] * mz[r]);
            out(r, c) = m(r, c) * std::polar(mag, phase);
        }
    return DensityMatrix(std::move(out));
}

DensityMatrix evolve(const DensityMatrix& rho0, const EvolutionConfig& cfg, double t) {
    return cfg.topology == BathTopology::local ? evolve_local(rho0, cfg, t)
                                               : evolve_common(rho0, cfg, t);
}

namespace {

using Mat8 = Eigen::Matrix<cplx, 8, 8>;

// Right-hand sides of the master equations, built from the sigma_z /
// collective-S_z action as diagonal operators.
struct Generator {
    const EvolutionConfig& cfg;
    Eigen::Matrix<double, 8, 1> sz_diag[3]; // sigma_z_i as a diagonal
    Eigen::Matrix<double, 8, 1> Sz_diag;    // collective S_z

    explicit Generator(const EvolutionConfig& c) : cfg(c) {
        for (int q = 0; q < 3; ++q)
            for (int b = 0; b < 8; ++b)
                sz_diag[q](b) = ((b >> (2 - q)) & 1) ? -1.0 : 1.0;
        for (int b = 0; b < 8; ++b)
            Sz_diag(b) = static_cast<double>(collective_sz(static_cast<unsigned>(b), 3));
    }

    // d/dt rho = sum_i gamma_i(t) (Z_i rho Z_i - rho)
    Mat8 local_rhs(const Mat8& rho, const double* gammas) const {
        Mat8 out = Mat8::Zero();
        for (int q = 0; q < 3; ++q) {
            const auto z = sz_diag[q].asDiagonal();
            out += gammas[q] * (z * rho * z - rho);
        }
        return out;
    }

    // d/dt rho = gamma(t) Sz rho Sz - alpha(t) Sz^2 rho - alpha*(t) rho Sz^2
    Mat8 common_rhs(const Mat8& rho, double gamma, cplx alpha) const {
        const auto z = Sz_diag.asDiagonal();
        const Eigen::Matrix<double, 8, 1> z2 = Sz_diag.cwiseProduct(Sz_diag);
        return gamma * (z * rho * z) - alpha * (z2.asDiagonal() * rho) -
               std::conj(alpha) * (rho * z2.asDiagonal());
    }
};

// Rates at the RK4 nodes (t_k and midpoints), by direct quadrature for
// non-Markov memory so the oracle shares no tabulation with the kernels.
struct RateGrid {
    std::vector<std::array<double, 3>> gamma_nodes; // [2N+1] x per-qubit
    std::vector<cplx> alpha_nodes;                  // common topology only

    RateGrid(const EvolutionConfig& cfg, double t, int n_steps) {
        const int nodes = 2 * n_steps + 1;
        const double h = t / n_steps;
        gamma_nodes.resize(nodes);
        if (cfg.topology == BathTopology::common)
            alpha_nodes.resize(nodes);
        for (int i = 0; i < nodes; ++i) {
            const double s = 0.5 * h * i;
            if (cfg.topology == BathTopology::local) {
                for (int q = 0; q < 3; ++q)
                    gamma_nodes[i][q] = cfg.memory == MemoryKind::markov
                                            ? markov_rate(cfg.baths[q])
                                            : dephasing_rate(s, cfg.baths[q]);
            } else {
                if (cfg.memory == MemoryKind::markov) {
                    const double g0 = markov_rate(cfg.baths[0]);
                    gamma_nodes[i][0] = g0;
                    alpha_nodes[i] = cplx(0.5 * g0, 0.0);
                } else {
                    // The real part of the memory coefficient is gamma/2 by
                    // the integrand identity; evaluating it that way keeps
                    // the generator exactly trace-preserving instead of
                    // drifting by quadrature noise.
                    gamma_nodes[i][0] = dephasing_rate(s, cfg.baths[0]);
                    alpha_nodes[i] = cplx(0.5 * gamma_nodes[i][0],
                                          alpha_rate(s, cfg.baths[0]).imag());
                }
            }
        }
    }
};

Mat8 rk4_integrate(const Mat8& rho0, const EvolutionConfig& cfg, const Generator& gen,
                   const RateGrid& rates, int n_steps, double h) {
    Mat8 rho = rho0;
    for (int k = 0; k < n_steps; ++k) {
        const auto& r0 = rates.gamma_nodes[2 * k];
        const auto& rm = rates.gamma_nodes[2 * k + 1];
        const auto& r1 = rates.gamma_nodes[2 * k + 2];
        Mat8 k1, k2, k3, k4;
        if (cfg.topology == BathTopology::local) {
            k1 = gen.local_rhs(rho, r0.data());
            k2 = gen.local_rhs(rho + 0.5 * h * k1, rm.data());
            k3 = gen.local_rhs(rho + 0.5 * h * k2, rm.data());
            k4 = gen.local_rhs(rho + h * k3, r1.data());
        } else {
            const cplx a0 = rates.alpha_nodes[2 * k];
            const cplx am = rates.alpha_nodes[2 * k + 1];
            const cplx a1 = rates.alpha_nodes[2 * k + 2];
            k1 = gen.common_rhs(rho, r0[0], a0);
            k2 = gen.common_rhs(rho + 0.5 * h * k1, rm[0], am);
            k3 = gen.common_rhs(rho + 0.5 * h * k2, rm[0], am);
            k4 = gen.common_rhs(rho + h * k3, r1[0], a1);
        }
        rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!rho.allFinite() || rho.cwiseAbs().maxCoeff() > 10.0)
            throw std::runtime_error("evolve_ode: step-size instability (divergent iterate)");
    }
    return rho;
}

} // namespace

std::vector<DensityMatrix> evolve_ode(std::span<const DensityMatrix> rho0s,
                                      const EvolutionConfig& cfg, double t,
                                      const OdeOptions& opts) {
    check_config(cfg);
    if (t < 0.0)
        throw std::invalid_argument("evolve_ode: t must be >= 0");
    std::vector<DensityMatrix> out;
    out.reserve(rho0s.size());
    if (t == 0.0) {
        for (const auto& r : rho0s)
            out.push_back(r);
        return out;
    }
    const int n_steps = static_cast<int>(std::ceil(t / opts.max_step));
    const double h = t / n_steps;
    const Generator gen(cfg);
    const RateGrid rates(cfg, t, n_steps);
    for (const auto& r : rho0s) {
        check_three_qubits(r);
        const Mat8 result = rk4_integrate(Mat8(r.matrix()), cfg, gen, rates, n_steps, h);
        const double drift = std::abs(result.trace().real() - 1.0) + std::abs(result.trace().imag());
        if (drift > opts.trace_tol)
            throw std::runtime_error("evolve_ode: step-size instability (trace drift " +
                                     std::to_string(drift) + ")");
        out.push_back(DensityMatrix(CMatrix(result)));
    }
    return out;
}

DensityMatrix evolve_ode(const DensityMatrix& rho0, const EvolutionConfig& cfg, double t,
                         const OdeOptions& opts) {
    return evolve_ode(std::span<const DensityMatrix>(&rho0, 1), cfg, t, opts)[0];
}

} // namespace trideph
