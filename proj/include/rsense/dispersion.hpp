#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "rsense/params.hpp"

// Bogoliubov spectrum of the quasi-2D dipolar condensate,
//   omega_k = 1/2 sqrt(k^4 + P k^2 [1 + chi v_D(k)]),
// with v_D(x) = 2 - 3 sqrt(pi/2) x exp(x^2/2) erfc(x/sqrt 2).
namespace rsense::dispersion {

/// Fourier transform of the effective 2D dipolar interaction, v_D(x), x >= 0.
double ddi_fourier(double x);
/// d v_D / dx.
double ddi_fourier_dx(double x);
/// d^2 v_D / dx^2.
double ddi_fourier_dx2(double x);

/// k^4 + P k^2 [1 + chi v_D(k)] = 4 omega_k^2.
double radicand(double k, const ParamSet& p);

/// k^2 + P [1 + chi v_D(k)]; the point is stable iff this is >= 0 for all k > 0.
double stability_margin(double k, const ParamSet& p);

/// Minimum of the stability margin over k > 0.
double min_stability_margin(const ParamSet& p);

bool is_stable(const ParamSet& p);

/// omega_k; throws InstabilityError if the radicand is negative at k.
double omega(double k, const ParamSet& p);
double omega_dk(double k, const ParamSet& p);
/// Analytic second derivative.
double omega_dk2(double k, const ParamSet& p);
/// Partial derivative in chi at fixed k: P k^2 v_D(k) / (8 omega_k).
double omega_dchi(double k, const ParamSet& p);

struct StationaryPoint {
    double k = 0.0;
    double omega = 0.0;
    double curvature = 0.0;    ///< omega''(k)
    double domega_dchi = 0.0;  ///< d omega / d chi at the stationary point
};

/// Maxon (local maximum) and roton (local minimum) of the spectrum.
struct RotonFeatures {
    StationaryPoint maxon;
    StationaryPoint roton;
};

/// Locates the stationary points of omega_k; nullopt when the spectrum is monotone.
std::optional<RotonFeatures> roton_features(const ParamSet& p);

/// Smallest chi at which a roton minimum exists, for the given P (bisection on chi).
double critical_chi_roton(double P);
/// Largest chi (to 1e-10) at which the condensate is still stable, for the given P.
double critical_chi_instability(double P);

/// Monotone spectra have a single branch; roton spectra split into the rising
/// phonon branch (k < k_M), the falling maxon-roton branch (k_M < k < k_m) and
/// the rising free-particle branch (k > k_m).
enum class Branch { Monotone, Phonon, MaxonRoton, FreeParticle };

std::string_view to_string(Branch b);

struct InverseRoot {
    double k;
    Branch branch;
};

/// All k with omega_k = omega, ordered by k. Throws BoundaryError when omega
/// coincides with omega_m or omega_M.
std::vector<InverseRoot> inverse_roots(double omega, const ParamSet& p);

/// Same as above with features precomputed and an explicit root tolerance.
std::vector<InverseRoot> inverse_roots(double omega, const ParamSet& p,
                                       const std::optional<RotonFeatures>& features, double tol);

/// Upper end of the k grid used for stationary-point and stability searches.
inline constexpr double kSearchMax = 20.0;
inline constexpr double kSearchMin = 1e-3;
inline constexpr std::size_t kSearchPoints = 2000;

} // namespace rsense::dispersion
