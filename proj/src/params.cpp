#include "rsense/params.hpp"

#include <cmath>
#include <numbers>

#include "rsense/dispersion.hpp"
#include "rsense/errors.hpp"

namespace rsense {

namespace {

void require_positive(double value, const char* name) {
    if (!(value > 0.0) || !std::isfinite(value)) {
        throw InvalidParameter(std::string(name) + " must be positive and finite");
    }
}

} // namespace

void ParamSet::check() const {
    require_positive(P, "P");
    require_positive(Q, "Q");
    require_positive(zeta, "zeta");
    if (!(chi >= 0.0) || !std::isfinite(chi)) {
        throw InvalidParameter("chi must be non-negative and finite");
    }
}

void PhysicalParams::check() const {
    require_positive(m_A, "m_A");
    require_positive(m_B, "m_B");
    require_positive(omega_A, "omega_A");
    require_positive(omega_z, "omega_z");
    require_positive(a_B, "a_B");
    if (!(a_AB >= 0.0) || !std::isfinite(a_AB)) {
        throw InvalidParameter("a_AB must be non-negative and finite");
    }
    require_positive(n, "n");
    if (mu_m) {
        require_positive(*mu_m, "mu_m");
    }
    if (chi && (!(*chi >= 0.0) || !std::isfinite(*chi))) {
        throw InvalidParameter("chi must be non-negative and finite");
    }
}

double oscillator_length(double mass, double omega) {
    require_positive(mass, "mass");
    require_positive(omega, "omega");
    return std::sqrt(phys::hbar / (mass * omega));
}

double impurity_width(const PhysicalParams& p) { return oscillator_length(p.m_A, p.omega_A); }

double reservoir_width(const PhysicalParams& p) { return oscillator_length(p.m_B, p.omega_z); }

ParamSet dimensionless_from_physical(const PhysicalParams& phys) {
    phys.check();
    const double lA = impurity_width(phys);
    const double lB = reservoir_width(phys);
    const double mass_ratio = (phys.m_A + phys.m_B) / phys.m_A;

    ParamSet out;
    out.P = 8.0 * std::sqrt(2.0 * std::numbers::pi) * lB * phys.a_B * phys.n;
    out.Q = phys.n * phys.a_AB * phys.a_AB * lB * lB * mass_ratio * mass_ratio / (lA * lA + lB * lB);
    out.zeta = lA / lB;
    if (phys.chi) {
        out.chi = *phys.chi;
    } else if (phys.mu_m) {
        const double g_dipolar = phys::mu0 * (*phys.mu_m) * (*phys.mu_m) / 3.0;
        const double g_contact = 4.0 * std::numbers::pi * phys::hbar * phys::hbar * phys.a_B / phys.m_B;
        out.chi = g_dipolar / g_contact;
    } else {
        out.chi = 0.0;
    }
    return out;
}

double excited_level_shift(const PhysicalParams& phys) {
    phys.check();
    const double lA = impurity_width(phys);
    const double lB = reservoir_width(phys);
    const double reduced = phys.m_A * phys.m_B / (phys.m_A + phys.m_B);
    return 2.0 * std::sqrt(std::numbers::pi) * phys.n * phys.a_AB * phys.m_B * lB * lB /
           (reduced * std::sqrt(lA * lA + lB * lB));
}

std::string_view to_string(Stability s) {
    switch (s) {
    case Stability::StableNoRoton:
        return "stable-no-roton";
    case Stability::StableRoton:
        return "stable-roton";
    case Stability::Unstable:
        return "unstable";
    }
    return "unknown";
}

Stability validate(const ParamSet& p) {
    p.check();
    if (!dispersion::is_stable(p)) {
        return Stability::Unstable;
    }
    return dispersion::roton_features(p) ? Stability::StableRoton : Stability::StableNoRoton;
}

PhysicalParams rb_in_dy_example(double chi) {
    PhysicalParams phys;
    phys.m_A = 86.909180527 * phys::atomic_mass;
    phys.m_B = 163.929174751 * phys::atomic_mass;
    phys.omega_z = 2.0 * std::numbers::pi * 1.0e3;
    // Equal oscillator widths: m_A omega_A = m_B omega_z.
    phys.omega_A = phys.omega_z * phys.m_B / phys.m_A;
    // Background scattering length of 164Dy is not part of the worked example;
    // 130 a0 reproduces the quoted P ~ 1.5.
    phys.a_B = 130.0 * phys::bohr_radius;
    phys.a_AB = 5.0e-9;
    phys.n = 4.4e9 * 1.0e4; // cm^-2 -> m^-2
    phys.chi = chi;
    return phys;
}

} // namespace rsense
