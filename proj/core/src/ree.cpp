#include "trideph/ree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <thread>

namespace trideph {

namespace {

using Mat8 = Eigen::Matrix<cplx, 8, 8>;
using Vec8 = Eigen::Matrix<cplx, 8, 1>;
using Mat2 = Eigen::Matrix2cd;
using Vec2 = Eigen::Vector2cd;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    return splitmix64(seed ^ splitmix64(stream + 1));
}

Vec2 bloch_vector(double theta, double phi) {
    return Vec2(cplx(std::cos(0.5 * theta), 0.0),
                std::polar(std::sin(0.5 * theta), phi));
}

std::pair<double, double> bloch_angles(const Vec2& v) {
    const double theta = 2.0 * std::atan2(std::abs(v(1)), std::abs(v(0)));
    double phi = 0.0;
    if (std::abs(v(0)) > 1e-15 && std::abs(v(1)) > 1e-15)
        phi = std::arg(v(1) * std::conj(v(0)));
    else if (std::abs(v(1)) > 1e-15)
        phi = std::arg(v(1));
    return {theta, phi};
}

// Euclidean projection onto the probability simplex.
void project_simplex(std::vector<double>& w) {
    const int n = static_cast<int>(w.size());
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](int a, int b) {
        return w[a] != w[b] ? w[a] > w[b] : a < b;
    });
    double running = 0.0;
    double tau = 0.0;
    for (int k = 0; k < n; ++k) {
        running += w[idx[k]];
        const double t = (running - 1.0) / (k + 1);
        if (w[idx[k]] - t > 0.0)
            tau = t;
    }
    for (auto& x : w)
        x = std::max(0.0, x - tau);
}

// Working state of one candidate term.
struct Term {
    double ang[6]; // (theta, phi) per qubit
    std::array<Vec2, 3> qv;
    Vec8 p;
    Mat8 proj;
    double delta = 0.4; // pattern-search step

    void refresh_qubit(int q) { qv[q] = bloch_vector(ang[2 * q], ang[2 * q + 1]); }
    void refresh_product() {
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                for (int k = 0; k < 2; ++k)
                    p(4 * i + 2 * j + k) = qv[0](i) * qv[1](j) * qv[2](k);
        proj = p * p.adjoint();
    }
    void set_angles(int q, double theta, double phi) {
        ang[2 * q] = theta;
        ang[2 * q + 1] = phi;
        refresh_qubit(q);
    }
};

// Scores candidates against a fixed rho: f = tr(rho ln rho) - tr(rho ln sigma)
// with sigma = (1 - eps) sigma_raw + (eps/8) I.
class Scorer {
public:
    Scorer(const Mat8& rho, double eps) : rho_(rho), eps_(eps) {
        Eigen::SelfAdjointEigenSolver<Mat8> es(rho);
        c_ = 0.0;
        for (int i = 0; i < 8; ++i) {
            const double p = es.eigenvalues()(i);
            if (p < kEigFloor)
                throw std::invalid_argument("ree: rho eigenvalue below clip floor");
            if (p > 0.0)
                c_ += p * std::log(p);
        }
    }

    double trace_rho_ln_rho() const { return c_; }
    const Mat8& rho() const { return rho_; }

    double value(const Mat8& sigma_raw) const {
        Mat8 sg = (1.0 - eps_) * sigma_raw;
        sg.diagonal().array() += eps_ / 8.0;
        es_.compute(sg);
        const Mat8 t = rho_ * es_.eigenvectors();
        double tr = 0.0;
        for (int i = 0; i < 8; ++i) {
            const double r_ii = std::real(es_.eigenvectors().col(i).dot(t.col(i)));
            tr += r_ii * std::log(es_.eigenvalues()(i));
        }
        return c_ - tr;
    }

    // Value plus the weight gradient at fixed terms:
    //   grad_k = -(1 - eps) q_k^dag (R o G) q_k,  q_k = V^dag p_k,
    // with R = V^dag rho V and G the Loewner matrix of ln on sigma's
    // spectrum.
    double value_and_weight_grad(const Mat8& sigma_raw, const std::vector<Term>& terms,
                                 std::vector<double>& grad) const {
        Mat8 sg = (1.0 - eps_) * sigma_raw;
        sg.diagonal().array() += eps_ / 8.0;
        es_.compute(sg);
        const auto& v = es_.eigenvectors();
        const auto& lam = es_.eigenvalues();

        const Mat8 r = v.adjoint() * rho_ * v;
        double tr = 0.0;
        for (int i = 0; i < 8; ++i)
            tr += std::real(r(i, i)) * std::log(lam(i));

        Mat8 phi;
        for (int i = 0; i < 8; ++i)
            for (int j = 0; j < 8; ++j) {
                const double li = lam(i), lj = lam(j);
                const double g = std::abs(li - lj) <= 1e-13 * std::max(li, lj)
                                     ? 2.0 / (li + lj)
                                     : (std::log(li) - std::log(lj)) / (li - lj);
                phi(i, j) = r(i, j) * g;
            }

        grad.resize(terms.size());
        for (std::size_t k = 0; k < terms.size(); ++k) {
            const Vec8 q = v.adjoint() * terms[k].p;
            grad[k] = -(1.0 - eps_) * std::real(cplx(q.adjoint() * phi * q));
        }
        return c_ - tr;
    }

private:
    Mat8 rho_;
    double c_ = 0.0;
    double eps_ = 0.0;
    mutable Eigen::SelfAdjointEigenSolver<Mat8> es_;
};

Mat8 assemble_sigma(const std::vector<double>& w, const std::vector<Term>& terms) {
    Mat8 s = Mat8::Zero();
    for (std::size_t k = 0; k < w.size(); ++k)
        if (w[k] > 0.0)
            s += w[k] * terms[k].proj;
    return s;
}

struct RestartResult {
    double value = std::numeric_limits<double>::infinity();
    std::vector<double> weights;
    std::vector<Term> terms;
    double residual = 0.0;
    bool converged = false;
};

// Marginal eigenvectors used to seed half of the restarts.
std::array<std::array<Vec2, 2>, 3> marginal_frames(const Mat8& rho) {
    std::array<std::array<Vec2, 2>, 3> frames;
    for (int q = 0; q < 3; ++q) {
        Mat2 red = Mat2::Zero();
        // Reduce onto qubit q (bit 2-q).
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
                for (int rest = 0; rest < 4; ++rest) {
                    // Full indices with qubit q set to a / b and the other
                    // two qubits running over `rest`.
                    int idx_a = 0, idx_b = 0, pos = 0;
                    for (int qq = 0; qq < 3; ++qq) {
                        const int bit = 2 - qq;
                        if (qq == q) {
                            idx_a |= a << bit;
                            idx_b |= b << bit;
                        } else {
                            const int rb = (rest >> pos) & 1;
                            idx_a |= rb << bit;
                            idx_b |= rb << bit;
                            ++pos;
                        }
                    }
                    red(a, b) += rho(idx_a, idx_b);
                }
        Eigen::SelfAdjointEigenSolver<Mat2> es(red);
        // Descending eigenvalue order.
        frames[q][0] = es.eigenvectors().col(1);
        frames[q][1] = es.eigenvectors().col(0);
    }
    return frames;
}

RestartResult run_restart(const Scorer& scorer, const ReeOptions& opts, int restart_index,
                          const std::array<std::array<Vec2, 2>, 3>& frames,
                          const SeparableEnsemble* warm) {
    const int K = opts.terms;
    std::mt19937_64 rng(mix_seed(opts.seed, static_cast<std::uint64_t>(restart_index)));
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    std::vector<Term> terms(K);
    auto randomize_term = [&](Term& t) {
        for (int q = 0; q < 3; ++q) {
            const double theta = std::acos(1.0 - 2.0 * unit(rng));
            const double phi = 2.0 * M_PI * unit(rng);
            t.set_angles(q, theta, phi);
        }
        t.refresh_product();
    };

    const bool warm_restart = warm != nullptr && restart_index == 0;
    const bool marginal_aligned = !warm_restart && restart_index < (opts.restarts + 1) / 2;
    for (int k = 0; k < K; ++k) {
        Term& t = terms[k];
        if (warm_restart && k < static_cast<int>(warm->terms.size())) {
            for (int q = 0; q < 3; ++q) {
                const auto [theta, phi] = bloch_angles(warm->terms[k].factors[q]);
                t.set_angles(q, theta, phi);
            }
            t.refresh_product();
        } else if (marginal_aligned && k < 8) {
            for (int q = 0; q < 3; ++q) {
                const auto [theta, phi] = bloch_angles(frames[q][(k >> (2 - q)) & 1]);
                t.set_angles(q, theta, phi);
            }
            t.refresh_product();
        } else {
            randomize_term(t);
        }
    }

    std::vector<double> w(K, 1.0 / K);
    if (warm_restart) {
        for (int k = 0; k < K; ++k)
            w[k] = k < static_cast<int>(warm->weights.size()) ? warm->weights[k] : 0.0;
        const double total = std::accumulate(w.begin(), w.end(), 0.0);
        if (total > 0.0)
            for (auto& x : w)
                x /= total;
        else
            std::fill(w.begin(), w.end(), 1.0 / K);
    }

    Mat8 sigma = assemble_sigma(w, terms);
    double f_cur = scorer.value(sigma);

    std::vector<double> grad, w_try;
    double pg_step = 1.0;
    int small_sweeps = 0;
    double last_improvement = 0.0;
    bool converged = false;
    int sweep = 0;

    for (; sweep < opts.max_sweeps; ++sweep) {
        const double f_sweep_start = f_cur;

        // (a) weight update: projected gradient descent with backtracking.
        for (int it = 0; it < 12; ++it) {
            const double f0 = scorer.value_and_weight_grad(sigma, terms, grad);
            f_cur = f0;
            bool accepted = false;
            double s = pg_step;
            for (int ls = 0; ls < 25; ++ls) {
                w_try = w;
                for (int k = 0; k < K; ++k)
                    w_try[k] -= s * grad[k];
                project_simplex(w_try);
                double move = 0.0;
                double pred = 0.0;
                for (int k = 0; k < K; ++k) {
                    move += std::abs(w_try[k] - w[k]);
                    pred += grad[k] * (w_try[k] - w[k]);
                }
                if (move < 1e-16)
                    break;
                const Mat8 sig_try = assemble_sigma(w_try, terms);
                const double f1 = scorer.value(sig_try);
                if (f1 <= f0 + 1e-4 * pred) {
                    w.swap(w_try);
                    sigma = sig_try;
                    f_cur = f1;
                    pg_step = std::min(s * 2.0, 64.0);
                    accepted = true;
                    break;
                }
                s *= 0.25;
            }
            if (!accepted) {
                pg_step = std::max(pg_step * 0.25, 1e-6);
                break;
            }
            if (f_cur > f0 - (1e-13 + 1e-10 * std::abs(f0)))
                break;
        }

        // (b) per-term single-qubit refinement by compass search.
        for (int k = 0; k < K; ++k) {
            if (w[k] <= 1e-12)
                continue;
            Term& t = terms[k];
            bool term_improved = false;
            for (int q = 0; q < 3; ++q) {
                const double th = t.ang[2 * q];
                const double ph = t.ang[2 * q + 1];
                const double d = t.delta;
                double best_f = f_cur;
                double best_th = th, best_ph = ph;
                const double trials[4][2] = {
                    {th + d, ph}, {th - d, ph}, {th, ph + d}, {th, ph - d}};
                const Vec2 saved_q = t.qv[q];
                const Vec8 saved_p = t.p;
                const Mat8 saved_proj = t.proj;
                for (const auto& tr : trials) {
                    t.set_angles(q, tr[0], tr[1]);
                    t.refresh_product();
                    const Mat8 sig_try = sigma + w[k] * (t.proj - saved_proj);
                    const double f_try = scorer.value(sig_try);
                    if (f_try < best_f) {
                        best_f = f_try;
                        best_th = tr[0];
                        best_ph = tr[1];
                    }
                }
                if (best_f < f_cur) {
                    t.set_angles(q, best_th, best_ph);
                    t.refresh_product();
                    sigma += w[k] * (t.proj - saved_proj);
                    f_cur = best_f;
                    term_improved = true;
                } else {
                    t.qv[q] = saved_q;
                    t.p = saved_p;
                    t.proj = saved_proj;
                    t.ang[2 * q] = th;
                    t.ang[2 * q + 1] = ph;
                }
            }
            t.delta = term_improved ? std::min(t.delta * 1.4, 0.8)
                                    : std::max(t.delta * 0.5, 1e-7);
        }

        // Rebuild to shed incremental-update rounding drift.
        sigma = assemble_sigma(w, terms);

        last_improvement = f_sweep_start - f_cur;
        const double rel = last_improvement / std::max(std::abs(f_cur), 1e-6);
        if (rel < opts.tol) {
            if (++small_sweeps >= opts.tol_window) {
                converged = true;
                ++sweep;
                break;
            }
        } else {
            small_sweeps = 0;
        }
    }

    RestartResult res;
    res.value = scorer.value(sigma);
    res.weights = std::move(w);
    res.terms = std::move(terms);
    res.residual = last_improvement;
    res.converged = converged;
    return res;
}

} // namespace

CVector ProductTerm::vector() const {
    CVector p(8);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k)
                p(4 * i + 2 * j + k) = factors[0](i) * factors[1](j) * factors[2](k);
    return p;
}

DensityMatrix SeparableEnsemble::mixture() const {
    CMatrix m = CMatrix::Zero(8, 8);
    for (std::size_t k = 0; k < terms.size(); ++k) {
        const CVector p = terms[k].vector();
        m += weights[k] * (p * p.adjoint());
    }
    return DensityMatrix(std::move(m));
}

namespace {

EntanglementEstimate ree_impl(const DensityMatrix& rho, const ReeOptions& opts,
                              const SeparableEnsemble* warm) {
    if (rho.qubits() != 3)
        throw std::invalid_argument("ree: needs a 3-qubit state");
    if (opts.terms < 1 || opts.restarts < 1)
        throw std::invalid_argument("ree: terms and restarts must be >= 1");

    const Mat8 rho8 = rho.matrix();
    const Scorer scorer(rho8, opts.epsilon);
    const auto frames = marginal_frames(rho8);

    const int total = opts.restarts + (warm != nullptr ? 1 : 0);
    std::vector<RestartResult> results(total);

    // Restart r of a warm solve reuses the previous argmin at index 0; the
    // remaining indices are fresh.  RNG streams depend only on (seed,
    // restart index) so the parallel schedule cannot change results.
    auto worker = [&](int thread_id, int stride) {
        for (int r = thread_id; r < total; r += stride)
            results[r] = run_restart(scorer, opts, r, frames, warm);
    };

    int n_threads = opts.threads > 0 ? opts.threads
                                     : static_cast<int>(std::thread::hardware_concurrency());
    n_threads = std::max(1, std::min(n_threads, total));
    if (n_threads == 1) {
        worker(0, 1);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        for (int i = 0; i < n_threads; ++i)
            pool.emplace_back(worker, i, n_threads);
        for (auto& th : pool)
            th.join();
    }

    int best = 0;
    for (int r = 1; r < total; ++r)
        if (results[r].value < results[best].value)
            best = r;

    const RestartResult& win = results[best];

    // Re-express the full-rank guard as explicit ensemble terms so the
    // reported mixture is exactly what was scored.
    EntanglementEstimate est;
    est.restarts_used = total;
    est.residual = win.residual;
    est.converged = win.converged;

    SeparableEnsemble& ens = est.sigma_star;
    ens.weights.reserve(win.weights.size() + 8);
    ens.terms.reserve(win.weights.size() + 8);
    for (std::size_t k = 0; k < win.weights.size(); ++k) {
        ens.weights.push_back((1.0 - opts.epsilon) * win.weights[k]);
        ProductTerm pt;
        for (int q = 0; q < 3; ++q)
            pt.factors[q] = win.terms[k].qv[q];
        ens.terms.push_back(std::move(pt));
    }
    for (int b = 0; b < 8; ++b) {
        ens.weights.push_back(opts.epsilon / 8.0);
        ProductTerm pt;
        for (int q = 0; q < 3; ++q) {
            const int bit = (b >> (2 - q)) & 1;
            pt.factors[q] = bit ? Vec2(0.0, 1.0) : Vec2(1.0, 0.0);
        }
        ens.terms.push_back(std::move(pt));
    }

    est.value = relative_entropy(rho, ens.mixture());
    return est;
}

} // namespace

EntanglementEstimate ree(const DensityMatrix& rho, const ReeOptions& opts) {
    return ree_impl(rho, opts, nullptr);
}

SeparableEnsemble closest_separable_state(const DensityMatrix& rho, const ReeOptions& opts) {
    return ree(rho, opts).sigma_star;
}

TimeSeries ree_time_series(const DensityMatrix& rho0, const EvolutionConfig& cfg,
                           std::span<const double> gamma0_times, const ReeOptions& opts,
                           const SeriesOptions& series) {
    if (gamma0_times.empty())
        throw std::invalid_argument("ree_time_series: empty time grid");
    const double gamma0 = markov_rate(cfg.baths.at(0));
    if (!(gamma0 > 0.0))
        throw std::invalid_argument("ree_time_series: Markov rate must be > 0");

    TimeSeries ts;
    ts.points.resize(gamma0_times.size());

    auto solve_point = [&](std::size_t j, const SeparableEnsemble* warm) {
        const double t = gamma0_times[j] / gamma0;
        const DensityMatrix rho_t = evolve(rho0, cfg, t);
        ReeOptions point_opts = opts;
        point_opts.seed = mix_seed(opts.seed, j);
        point_opts.threads = series.warm_start ? opts.threads : 1;
        const EntanglementEstimate est = ree_impl(rho_t, point_opts, warm);
        ts.points[j] = {gamma0_times[j], est.value, est.converged};
        return est;
    };

    if (series.warm_start) {
        SeparableEnsemble prev;
        bool have_prev = false;
        for (std::size_t j = 0; j < gamma0_times.size(); ++j) {
            const EntanglementEstimate est = solve_point(j, have_prev ? &prev : nullptr);
            prev = est.sigma_star;
            have_prev = true;
        }
    } else {
        int n_threads = series.threads > 0
                            ? series.threads
                            : static_cast<int>(std::thread::hardware_concurrency());
        n_threads = std::max(1, std::min<int>(n_threads, gamma0_times.size()));
        auto worker = [&](int tid) {
            for (std::size_t j = tid; j < gamma0_times.size();
                 j += static_cast<std::size_t>(n_threads))
                solve_point(j, nullptr);
        };
        if (n_threads == 1) {
            worker(0);
        } else {
            std::vector<std::thread> pool;
            for (int i = 0; i < n_threads; ++i)
                pool.emplace_back(worker, i);
            for (auto& th : pool)
                th.join();
        }
    }
    return ts;
}

} // namespace trideph
