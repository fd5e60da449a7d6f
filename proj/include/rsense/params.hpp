#pragma once

#include <optional>
#include <string_view>

namespace rsense {

/// Dimensionless model point. Frequencies are in units of the axial trap
/// frequency omega_z, wave vectors in units of 1/l_B, times in 1/omega_z.
struct ParamSet {
    double P = 2.0;     ///< contact interaction, 8 sqrt(2 pi) l_B a_B n
    double Q = 4e-3;    ///< qubit-reservoir coupling
    double zeta = 1.0;  ///< trap-width ratio l_A / l_B
    double chi = 0.0;   ///< relative dipole-dipole strength g_D / g_B

    /// Throws InvalidParameter unless P > 0, Q > 0, zeta > 0, chi >= 0.
    void check() const;

    ParamSet with_chi(double new_chi) const {
        ParamSet out = *this;
        out.chi = new_chi;
        return out;
    }
    ParamSet with_Q(double new_Q) const {
        ParamSet out = *this;
        out.Q = new_Q;
        return out;
    }

    friend bool operator==(const ParamSet&, const ParamSet&) = default;
};

/// Impurity + reservoir parameters in SI units.
///
/// The impurity trap is assumed deep enough (hbar omega_A >> k_B T) that the
/// impurity sits in its motional ground state; this is not checked.
struct PhysicalParams {
    double m_A = 0.0;      ///< impurity mass [kg]
    double m_B = 0.0;      ///< reservoir atom mass [kg]
    double omega_A = 0.0;  ///< impurity trap frequency [rad/s]
    double omega_z = 0.0;  ///< reservoir axial trap frequency [rad/s]
    double a_B = 0.0;      ///< reservoir s-wave scattering length [m]
    double a_AB = 0.0;     ///< impurity-reservoir scattering length [m]
    double n = 0.0;        ///< condensate area density [1/m^2]
    /// Either the magnetic moment [A m^2] or chi directly; chi wins if both are set.
    std::optional<double> mu_m;
    std::optional<double> chi;

    /// Throws InvalidParameter unless every field (and the optional ones, when set) is
    /// positive. a_AB = 0 (decoupled impurity) is allowed.
    void check() const;
};

namespace phys {
inline constexpr double hbar = 1.054571817e-34;         // J s
inline constexpr double mu0 = 1.25663706212e-6;         // N / A^2
inline constexpr double atomic_mass = 1.66053906660e-27; // kg
inline constexpr double bohr_radius = 5.29177210903e-11; // m
inline constexpr double bohr_magneton = 9.2740100783e-24; // A m^2
} // namespace phys

/// Harmonic-oscillator width sqrt(hbar / (m omega)).
double oscillator_length(double mass, double omega);

/// l_A = sqrt(hbar / (m_A omega_A)).
double impurity_width(const PhysicalParams& phys);
/// l_B = sqrt(hbar / (m_B omega_z)).
double reservoir_width(const PhysicalParams& phys);

/// P = 8 sqrt(2 pi) l_B a_B n, Q = n a_AB^2 l_B^2 (m_A+m_B)^2 / [m_A^2 (l_A^2+l_B^2)],
/// zeta = l_A / l_B, chi = g_D / g_B with g_D = mu0 mu_m^2 / 3, g_B = 4 pi hbar^2 a_B / m_B.
ParamSet dimensionless_from_physical(const PhysicalParams& phys);

/// Collisional shift of the excited level in units of omega_z:
/// 2 sqrt(pi) n a_AB m_B l_B^2 / [m_AB sqrt(l_A^2 + l_B^2)], m_AB the reduced mass.
double excited_level_shift(const PhysicalParams& phys);

enum class Stability { StableNoRoton, StableRoton, Unstable };

std::string_view to_string(Stability s);

/// Classifies a parameter point by the shape of its excitation spectrum.
Stability validate(const ParamSet& p);

/// The impurity used in the worked example: 87Rb in a 164Dy condensate,
/// omega_z = 2 pi x 1 kHz, n = 4.4e9 cm^-2, a_AB = 5 nm, l_A = l_B.
PhysicalParams rb_in_dy_example(double chi = 0.0);

} // namespace rsense
