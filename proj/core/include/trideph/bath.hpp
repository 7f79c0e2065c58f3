// bath.hpp
// Ohmic dephasing baths: spectral density, time-dependent dephasing rates
// from frequency quadrature, their Markov limits, and tabulated kernels
// with cumulative integrals.
//
// Natural units throughout: hbar = k_B = omega0 = 1.  Frequencies and
// rates are in units of omega0, times in units of 1/omega0.

#pragma once

#include "trideph/qstate.hpp"

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace trideph {

enum class BathTopology { local, common };
enum class MemoryKind { markov, non_markov };

/// Thermal Ohmic bath: J(w) = eta * w * exp(-w / lambda_cut).
struct BathSpec {
    double eta = 0.1;            // dimensionless coupling
    double lambda_cut = 1e-2;    // cutoff frequency
    double kbt = 1.0 / (4.0 * 3.14159265358979323846); // k_B T, default gamma0 = eta
    BathTopology topology = BathTopology::local;
};

/// Throws std::invalid_argument unless eta, lambda_cut, kbt are all > 0.
void validate(const BathSpec& spec);

/// Raised when the frequency quadrature cannot reach its tolerance; the
/// message carries the achieved error estimate.
struct QuadratureError : std::runtime_error {
    QuadratureError(const std::string& msg, double achieved)
        : std::runtime_error(msg), achieved_error(achieved) {}
    double achieved_error = 0.0;
};

/// Ohmic spectral density J(w) = eta w exp(-w/Lambda).  Throws on w < 0.
double spectral_density(double omega, const BathSpec& spec);

/// Time-dependent dephasing rate
///   gamma(t) = 2 int_0^inf dw J(w) coth(w / (2 kbt)) sin(w t) / w,
/// evaluated by adaptive panel quadrature.  The w -> 0 endpoint uses the
/// finite series limit of the integrand.  gamma(0) = 0.
double dephasing_rate(double t, const BathSpec& spec);

/// Complex memory coefficient of the common-bath master equation,
///   alpha(t) = int J coth sin(wt)/w dw - i int J (1 - cos(wt))/w dw.
/// Re alpha(t) = gamma(t)/2 up to quadrature tolerance; Im alpha(t) <= 0.
cplx alpha_rate(double t, const BathSpec& spec);

/// Long-time Markov dephasing rate, 4 pi eta k_B T (units of omega0).
double markov_rate(const BathSpec& spec);

/// Tabulated rates and their running integrals on a uniform time grid.
/// Gamma_int(t) = int_0^t gamma, A_int(t) = int_0^t alpha; the cumulative
/// columns use per-step Simpson refinement with midpoint rate evaluations.
struct DephasingKernel {
    std::vector<double> times;
    std::vector<double> gamma;
    std::vector<cplx> alpha;
    std::vector<double> Gamma_int;
    std::vector<cplx> A_int;

    double t_max() const { return times.empty() ? 0.0 : times.back(); }

    // Linear interpolation; throws std::out_of_range outside [0, t_max].
    double gamma_at(double t) const;
    cplx alpha_at(double t) const;
    double Gamma_at(double t) const;
    cplx A_at(double t) const;
};

/// Tabulates the kernel on n_steps uniform intervals over [0, t_max]
/// (n_steps + 1 rows).  MemoryKind::markov fills the constant-rate kernel
/// (gamma = gamma0, Gamma_int = gamma0 t, Im A = 0) without quadrature.
DephasingKernel build_kernel(const BathSpec& spec, double t_max, int n_steps,
                             MemoryKind memory = MemoryKind::non_markov);

/// CSV dump: "t,gamma,re_alpha,im_alpha,Gamma_int,re_A,im_A" (omega0 = 1).
void write_kernel_csv(const DephasingKernel& kernel, std::ostream& os);

} // namespace trideph
