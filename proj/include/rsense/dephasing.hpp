#pragma once

#include <cstddef>
#include <vector>

#include "rsense/dispersion.hpp"
#include "rsense/numerics.hpp"
#include "rsense/params.hpp"

// Decoherence factor of the probe qubit at zero temperature,
//   Gamma(t) = Q int_0^inf f(k) [1 - cos(omega_k t)] / omega_k^3 dk,  f(k) = k^3 exp(-zeta^2 k^2 / 2),
// split as Gamma = Gamma0 + Gamma1(t).
namespace rsense::dephasing {

/// f(k) = k^3 exp(-zeta^2 k^2 / 2).
double mode_weight(double k, const ParamSet& p);

/// Upper wave-vector cutoff used by all k-space integrals.
double k_cutoff(const ParamSet& p);

double gamma0(const ParamSet& p, const numerics::QuadSpec& spec = {});
double gamma0_dchi(const ParamSet& p, const numerics::QuadSpec& spec = {});

double gamma(double t, const ParamSet& p, const numerics::QuadSpec& spec = {});
double gamma_dchi(double t, const ParamSet& p, const numerics::QuadSpec& spec = {});

/// Gamma(t) - Gamma0.
double gamma1(double t, const ParamSet& p, const numerics::QuadSpec& spec = {});

/// -int_0^inf G(omega) cos(omega t) d omega evaluated branch by branch in
/// frequency space; band-edge singularities are removed by omega = edge +- u^2.
/// Independent of the k-space route; used for validation.
double gamma1_spectral(double t, const ParamSet& p, const numerics::QuadSpec& spec = {});

/// G(omega) = Q sum_i f(k_i) / (omega^3 |d omega/dk|(k_i)) over all roots of omega_k = omega.
double spectral_density(double omega, const ParamSet& p);

/// Inverse-square-root singularities of G at the roton band edges.
struct SpectralApprox {
    double omega_m = 0.0;
    double omega_M = 0.0;
    double g_m = 0.0;  ///< units omega_z^{-1/2}
    double g_M = 0.0;
};

/// g_m = Q sqrt(2 / omega''(k_m)) f(k_m) / omega_m^3, likewise g_M with |omega''(k_M)|.
/// Throws RegimeError outside the roton regime.
SpectralApprox singular_approx(const ParamSet& p);
SpectralApprox singular_approx(const ParamSet& p, const dispersion::RotonFeatures& features);

/// -sqrt(pi/t) [g_m cos(omega_m t + pi/4) + g_M cos(omega_M t - pi/4)], t > 0.
double gamma1_tilde(double t, const SpectralApprox& approx);

struct GammaValue {
    double gamma = 0.0;
    double gamma_dchi = 0.0;
};

/// Fixed Gauss-Kronrod node table for evaluating Gamma and dGamma/dchi at many
/// times t <= t_max. Panels obey the same 1/8-period law as the adaptive
/// oscillatory quadrature evaluated at t_max, so every t below it is resolved.
class ModeTable {
public:
    ModeTable(const ParamSet& p, double t_max);

    const ParamSet& params() const noexcept { return params_; }
    double t_max() const noexcept { return t_max_; }
    std::size_t nodes() const noexcept { return omega_.size(); }

    double gamma0() const noexcept { return gamma0_; }
    double gamma0_dchi() const noexcept { return gamma0_dchi_; }

    /// Throws DomainError for t outside [0, t_max].
    GammaValue evaluate(double t) const;

    /// Evaluates every t in order, distributing contiguous chunks over `jobs`
    /// threads. Output order and values do not depend on `jobs`.
    std::vector<GammaValue> evaluate(const std::vector<double>& times, unsigned jobs = 1) const;

    /// Uniform grid t_i = t_min + i dt, i < steps. Phases are advanced by an
    /// angle-addition recurrence and re-seeded exactly every kBlock samples, so
    /// the result is independent of `jobs` and agrees with evaluate(t) to
    /// ~1e-11 relative.
    std::vector<GammaValue> evaluate_grid(double t_min, double dt, std::size_t steps, unsigned jobs = 1) const;

    static constexpr std::size_t kBlock = 32;

private:
    void evaluate_block(double t_start, double dt, const std::vector<double>& rot_sin,
                        const std::vector<double>& rot_cos, std::size_t count, GammaValue* out) const;

    ParamSet params_;
    double t_max_;
    std::vector<double> omega_;
    std::vector<double> amp_;        // w Q f / omega^3
    std::vector<double> amp_dchi_;   // w Q f (d omega/d chi) / omega^3
    double gamma0_ = 0.0;
    double gamma0_dchi_ = 0.0;
};

/// Uniform grid of `steps` points on [t_min, t_max] (both ends included).
std::vector<double> time_grid(double t_min, double t_max, std::size_t steps);

} // namespace rsense::dephasing
