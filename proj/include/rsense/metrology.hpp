#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "rsense/dephasing.hpp"
#include "rsense/params.hpp"

namespace rsense::metrology {

/// Reduced probe state 1/2 [[1, e^-Gamma], [e^-Gamma, 1]].
struct ProbeState {
    double gamma = 0.0;

    double coherence() const;
    /// <sigma_x>.
    double sigma_x_mean() const { return coherence(); }
    /// <Delta sigma_x^2> = 1 - e^{-2 Gamma}.
    double sigma_x_variance() const;
};

/// (dGamma/dchi)^2 / (e^{2 Gamma} - 1); zero when Gamma = 0.
double qfi_from(double gamma, double gamma_dchi);

/// (d<sigma_x>/dchi)^2 / <Delta sigma_x^2> with <sigma_x> = e^-Gamma.
double fisher_sigma_x_from(double gamma, double gamma_dchi);

double qfi(double t, const ParamSet& p, const numerics::QuadSpec& spec = {});
double fisher_sigma_x(double t, const ParamSet& p, const numerics::QuadSpec& spec = {});

/// Long-time QFI law F ~ A t sin^2(phi) - B sqrt(t) sin(phi) + C, phi = omega_m t + pi/4.
struct EnvelopeCoefficients {
    double A = 0.0;            ///< omega_z
    double B = 0.0;            ///< omega_z^{1/2}
    double C = 0.0;            ///< dimensionless
    double a_m = 0.0;          ///< g_m d omega_m / d chi, omega_z^{1/2}
    double a_M = 0.0;          ///< g_M d omega_M / d chi, omega_z^{1/2}
    double omega_m = 0.0;
    double gamma0 = 0.0;
    double gamma0_dchi = 0.0;
};

/// Throws RegimeError outside the roton regime.
EnvelopeCoefficients envelope_coefficients(const ParamSet& p, const numerics::QuadSpec& spec = {});

double qfi_tilde(double t, const EnvelopeCoefficients& c);

/// A t + B sqrt(t) + C.
double qfi_envelope(double t, const EnvelopeCoefficients& c);

struct LocalOptimum {
    int n;
    double t;
    double value;
};

/// t_LO = (2n + 5/4) pi / omega_m for n = 1..n_max with the envelope value there.
std::vector<LocalOptimum> local_optimal_times(const EnvelopeCoefficients& c, int n_max);

/// Sum over maximal runs where the sampled Gamma decreases of the gain in
/// coherence e^-Gamma. Run endpoints (local extrema) are refined by a
/// three-point parabola. `gamma` is sampled on a uniform grid.
double non_markovianity_from_samples(std::span<const double> gamma);

/// Running measure: element i is the measure of samples [0, i].
std::vector<double> non_markovianity_profile(std::span<const double> gamma);

/// Gamma on the grid 0, dt, ..., ceil(t_max/dt) dt. Throws ResolutionError in
/// the roton regime when dt > pi / (4 omega_m).
std::vector<double> sample_gamma(const ParamSet& p, double t_max, double dt, unsigned jobs = 1);

/// Measure on [0, horizon] sampled with step dt. Throws ResolutionError in the
/// roton regime when dt > pi / (4 omega_m).
double non_markovianity(const ParamSet& p, double horizon, double dt, unsigned jobs = 1);

/// Measure at each horizon in `horizons` from a single sampled Gamma.
std::vector<double> non_markovianity(const ParamSet& p, const std::vector<double>& horizons, double dt,
                                     unsigned jobs = 1);

struct Peak {
    std::size_t index;
    double t;
    double value;
};

/// Three-point discrete local maxima of y that are also the largest sample
/// within +-half_window of their own time. half_window = 0 keeps every
/// three-point peak.
std::vector<Peak> local_maxima(std::span<const double> t, std::span<const double> y, double half_window);

} // namespace rsense::metrology
