#include "trideph/bath.hpp"

#include "quad.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace trideph {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Frequency window and panel layout for the oscillatory rate integrals.
// The window covers both the exponential cutoff and the sin(wt)
// oscillation scale; no panel spans more than a quarter oscillation, and
// panels over the cutoff envelope are additionally capped at Lambda/2 so
// the envelope cannot fall between probe points when the oscillation is
// slow.  Beyond ~60 cutoffs the integrand is below machine noise and
// quarter-oscillation panels suffice.
struct QuadWindow {
    double omega_max;
    double envelope_end; // <= omega_max
    double core_panel;
    double tail_panel;
};

QuadWindow window_for(double t, const BathSpec& spec) {
    const double omega_max = std::max(50.0 * spec.lambda_cut, 40.0 / t);
    const double quarter_osc = kPi / (4.0 * t);
    QuadWindow w;
    w.omega_max = omega_max;
    w.envelope_end = std::min(omega_max, 60.0 * spec.lambda_cut);
    w.core_panel = std::min({omega_max, quarter_osc, 0.5 * spec.lambda_cut});
    w.tail_panel = std::min(omega_max, quarter_osc);
    return w;
}

template <class F>
double integrate_window(const F& f, const QuadWindow& w) {
    double total = detail::integrate_panels(f, 0.0, w.envelope_end, w.core_panel);
    if (w.envelope_end < w.omega_max)
        total += detail::integrate_panels(f, w.envelope_end, w.omega_max, w.tail_panel);
    return total;
}

} // namespace

void validate(const BathSpec& spec) {
    if (!(spec.eta > 0.0))
        throw std::invalid_argument("BathSpec: eta must be > 0");
    if (!(spec.lambda_cut > 0.0))
        throw std::invalid_argument("BathSpec: lambda_cut must be > 0");
    if (!(spec.kbt > 0.0))
        throw std::invalid_argument("BathSpec: kbt must be > 0");
}

double spectral_density(double omega, const BathSpec& spec) {
    if (omega < 0.0)
        throw std::invalid_argument("spectral_density: omega must be >= 0");
    return spec.eta * omega * std::exp(-omega / spec.lambda_cut);
}

double dephasing_rate(double t, const BathSpec& spec) {
    validate(spec);
    if (t < 0.0)
        throw std::invalid_argument("dephasing_rate: t must be >= 0");
    if (t == 0.0)
        return 0.0;

    const auto w = window_for(t, spec);
    // Integrand 2 J(w) coth(w/2kbt) sin(wt)/w; the coth pole cancels the
    // linear zero of J, finite limit 4 eta kbt t at w = 0.
    const auto integrand = [&](double omega) {
        if (omega <= 0.0)
            return 4.0 * spec.eta * spec.kbt * t;
        return 2.0 * spec.eta * std::exp(-omega / spec.lambda_cut) *
               detail::coth_stable(omega / (2.0 * spec.kbt)) * std::sin(omega * t);
    };
    return integrate_window(integrand, w);
}

cplx alpha_rate(double t, const BathSpec& spec) {
    validate(spec);
    if (t < 0.0)
        throw std::invalid_argument("alpha_rate: t must be >= 0");
    if (t == 0.0)
        return {0.0, 0.0};

    const auto w = window_for(t, spec);
    const auto re_integrand = [&](double omega) {
        if (omega <= 0.0)
            return 2.0 * spec.eta * spec.kbt * t;
        return spec.eta * std::exp(-omega / spec.lambda_cut) *
               detail::coth_stable(omega / (2.0 * spec.kbt)) * std::sin(omega * t);
    };
    const auto im_integrand = [&](double omega) {
        if (omega <= 0.0)
            return 0.0;
        return spec.eta * std::exp(-omega / spec.lambda_cut) * (1.0 - std::cos(omega * t));
    };
    const double re = integrate_window(re_integrand, w);
    const double im = -integrate_window(im_integrand, w);
    return {re, im};
}

double markov_rate(const BathSpec& spec) {
    return 4.0 * kPi * spec.eta * spec.kbt;
}

namespace {

// Piecewise-linear lookup shared by the kernel accessors.
template <class T>
T interp(const std::vector<double>& xs, const std::vector<T>& ys, double x, const char* what) {
    if (xs.empty())
        throw std::out_of_range(std::string(what) + ": empty kernel");
    const double tmax = xs.back();
    if (x < 0.0 || x > tmax * (1.0 + 1e-12) + 1e-300)
        throw std::out_of_range(std::string(what) + ": t outside tabulated range");
    if (x >= tmax)
        return ys.back();
    const double step = xs[1] - xs[0];
    const auto i = static_cast<std::size_t>(x / step);
    const std::size_t lo = std::min(i, xs.size() - 2);
    const double u = (x - xs[lo]) / (xs[lo + 1] - xs[lo]);
    return ys[lo] + u * (ys[lo + 1] - ys[lo]);
}

} // namespace

namespace {

// The cumulative columns interpolate as the integral of the linearly
// interpolated rate (piecewise quadratic), with the small Simpson-vs-
// trapezoid endpoint difference spread linearly so cell edges reproduce
// the stored values exactly.  Linear interpolation of the integral itself
// misses the module's 1e-6 relative budget on the default grid.
template <class T>
T integral_interp(const std::vector<double>& xs, const std::vector<T>& rate,
                  const std::vector<T>& cum, double x, const char* what) {
    if (xs.empty())
        throw std::out_of_range(std::string(what) + ": empty kernel");
    const double tmax = xs.back();
    if (x < 0.0 || x > tmax * (1.0 + 1e-12) + 1e-300)
        throw std::out_of_range(std::string(what) + ": t outside tabulated range");
    if (x >= tmax)
        return cum.back();
    const double h = xs[1] - xs[0];
    const auto i = std::min(static_cast<std::size_t>(x / h), xs.size() - 2);
    const double u = x - xs[i];
    const T trap = 0.5 * h * (rate[i] + rate[i + 1]);
    const T corr = cum[i + 1] - cum[i] - trap;
    return cum[i] + u * rate[i] + (0.5 * u * u / h) * (rate[i + 1] - rate[i]) + (u / h) * corr;
}

} // namespace

double DephasingKernel::gamma_at(double t) const { return interp(times, gamma, t, "gamma_at"); }
cplx DephasingKernel::alpha_at(double t) const { return interp(times, alpha, t, "alpha_at"); }
double DephasingKernel::Gamma_at(double t) const {
    return integral_interp(times, gamma, Gamma_int, t, "Gamma_at");
}
cplx DephasingKernel::A_at(double t) const {
    return integral_interp(times, alpha, A_int, t, "A_at");
}

DephasingKernel build_kernel(const BathSpec& spec, double t_max, int n_steps, MemoryKind memory) {
    validate(spec);
    if (!(t_max > 0.0))
        throw std::invalid_argument("build_kernel: t_max must be > 0");
    if (n_steps < 2)
        throw std::invalid_argument("build_kernel: n_steps must be >= 2");

    DephasingKernel k;
    const std::size_t n = static_cast<std::size_t>(n_steps) + 1;
    k.times.resize(n);
    k.gamma.resize(n);
    k.alpha.resize(n);
    k.Gamma_int.resize(n);
    k.A_int.resize(n);
    const double h = t_max / n_steps;
    for (std::size_t i = 0; i < n; ++i)
        k.times[i] = static_cast<double>(i) * h;

    if (memory == MemoryKind::markov) {
        const double g0 = markov_rate(spec);
        for (std::size_t i = 0; i < n; ++i) {
            k.gamma[i] = g0;
            k.alpha[i] = cplx(0.5 * g0, 0.0);
            k.Gamma_int[i] = g0 * k.times[i];
            k.A_int[i] = cplx(0.5 * g0 * k.times[i], 0.0);
        }
        return k;
    }

    for (std::size_t i = 0; i < n; ++i) {
        k.gamma[i] = dephasing_rate(k.times[i], spec);
        k.alpha[i] = alpha_rate(k.times[i], spec);
    }
    // Cumulative integrals by per-step Simpson with midpoint refinement.
    k.Gamma_int[0] = 0.0;
    k.A_int[0] = {0.0, 0.0};
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double tm = 0.5 * (k.times[i] + k.times[i + 1]);
        const double gm = dephasing_rate(tm, spec);
        const cplx am = alpha_rate(tm, spec);
        k.Gamma_int[i + 1] = k.Gamma_int[i] + (h / 6.0) * (k.gamma[i] + 4.0 * gm + k.gamma[i + 1]);
        k.A_int[i + 1] = k.A_int[i] + (h / 6.0) * (k.alpha[i] + 4.0 * am + k.alpha[i + 1]);
    }
    return k;
}

void write_kernel_csv(const DephasingKernel& kernel, std::ostream& os) {
    os << "t,gamma,re_alpha,im_alpha,Gamma_int,re_A,im_A\n";
    char buf[256];
    for (std::size_t i = 0; i < kernel.times.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g\n",
                      kernel.times[i], kernel.gamma[i], kernel.alpha[i].real(),
                      kernel.alpha[i].imag(), kernel.Gamma_int[i], kernel.A_int[i].real(),
                      kernel.A_int[i].imag());
        os << buf;
    }
}

} // namespace trideph
