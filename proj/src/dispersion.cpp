#include "rsense/dispersion.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "rsense/errors.hpp"
#include "rsense/numerics.hpp"

namespace rsense::dispersion {

namespace {

const double kSqrtHalfPi = std::sqrt(0.5 * std::numbers::pi);
const double kInvSqrt2 = 1.0 / std::numbers::sqrt2;

constexpr double kRootTol = 1e-12;
constexpr double kChiTol = 1e-10;

// exp(x^2/2) erfc(x/sqrt 2)
double scaled_tail(double x) { return numerics::erfcx(x * kInvSqrt2); }

const std::vector<double>& search_grid() {
    static const std::vector<double> grid = numerics::logspace(kSearchMin, kSearchMax, kSearchPoints);
    return grid;
}

void require_k(double k) {
    if (!(k >= 0.0) || !std::isfinite(k)) {
        throw DomainError("wave vector must be non-negative and finite, got " + std::to_string(k));
    }
}

// R' = d/dk [k^4 + P k^2 (1 + chi v)]
double radicand_dk(double k, const ParamSet& p) {
    const double v = ddi_fourier(k);
    const double dv = ddi_fourier_dx(k);
    return 4.0 * k * k * k + p.P * (2.0 * k * (1.0 + p.chi * v) + k * k * p.chi * dv);
}

double radicand_dk2(double k, const ParamSet& p) {
    const double v = ddi_fourier(k);
    const double dv = ddi_fourier_dx(k);
    const double d2v = ddi_fourier_dx2(k);
    return 12.0 * k * k + p.P * (2.0 * (1.0 + p.chi * v) + 4.0 * k * p.chi * dv + k * k * p.chi * d2v);
}

double nonzero_omega(double k, const ParamSet& p, const char* what) {
    const double w = omega(k, p);
    if (!(w > 0.0)) {
        throw SingularDerivative(std::string(what) + " is singular where omega_k = 0 (k = " +
                                 std::to_string(k) + ")");
    }
    return w;
}

StationaryPoint make_stationary(double k, const ParamSet& p) {
    StationaryPoint s;
    s.k = k;
    s.omega = omega(k, p);
    s.curvature = omega_dk2(k, p);
    // d/dchi omega(k*(chi), chi) = partial_chi omega since omega'(k*) = 0.
    s.domega_dchi = omega_dchi(k, p);
    return s;
}

} // namespace

double ddi_fourier(double x) {
    if (!(x >= 0.0)) {
        throw DomainError("ddi_fourier requires x >= 0");
    }
    return 2.0 - 3.0 * kSqrtHalfPi * x * scaled_tail(x);
}

double ddi_fourier_dx(double x) {
    if (!(x >= 0.0)) {
        throw DomainError("ddi_fourier_dx requires x >= 0");
    }
    return 3.0 * x - 3.0 * kSqrtHalfPi * (1.0 + x * x) * scaled_tail(x);
}

double ddi_fourier_dx2(double x) {
    if (!(x >= 0.0)) {
        throw DomainError("ddi_fourier_dx2 requires x >= 0");
    }
    return 6.0 + 3.0 * x * x - 3.0 * kSqrtHalfPi * x * (3.0 + x * x) * scaled_tail(x);
}

double radicand(double k, const ParamSet& p) {
    require_k(k);
    return k * k * k * k + p.P * k * k * (1.0 + p.chi * ddi_fourier(k));
}

double stability_margin(double k, const ParamSet& p) {
    require_k(k);
    return k * k + p.P * (1.0 + p.chi * ddi_fourier(k));
}

double min_stability_margin(const ParamSet& p) {
    p.check();
    const auto& grid = search_grid();
    std::size_t best = 0;
    double best_value = stability_margin(grid[0], p);
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const double s = stability_margin(grid[i], p);
        if (s < best_value) {
            best_value = s;
            best = i;
        }
    }
    const double lo = grid[best == 0 ? 0 : best - 1];
    const double hi = grid[std::min(best + 1, grid.size() - 1)];
    const auto margin = [&](double k) { return stability_margin(k, p); };
    const double k = numerics::minimize_bracketed(margin, lo, hi, 1e-12);
    return std::min(best_value, margin(k));
}

bool is_stable(const ParamSet& p) { return min_stability_margin(p) >= 0.0; }

double omega(double k, const ParamSet& p) {
    const double r = radicand(k, p);
    if (r < 0.0) {
        throw InstabilityError("imaginary Bogoliubov frequency at k = " + std::to_string(k) +
                                   " (chi = " + std::to_string(p.chi) + ", P = " + std::to_string(p.P) + ")",
                               k);
    }
    return 0.5 * std::sqrt(r);
}

double omega_dk(double k, const ParamSet& p) {
    const double w = nonzero_omega(k, p, "d omega / dk");
    return radicand_dk(k, p) / (8.0 * w);
}

double omega_dk2(double k, const ParamSet& p) {
    const double w = nonzero_omega(k, p, "d^2 omega / dk^2");
    const double d1 = radicand_dk(k, p) / (8.0 * w);
    return radicand_dk2(k, p) / (8.0 * w) - d1 * d1 / w;
}

double omega_dchi(double k, const ParamSet& p) {
    const double w = nonzero_omega(k, p, "d omega / d chi");
    return p.P * k * k * ddi_fourier(k) / (8.0 * w);
}

std::optional<RotonFeatures> roton_features(const ParamSet& p) {
    p.check();
    const auto& grid = search_grid();
    const auto slope = [&](double k) { return omega_dk(k, p); };

    std::vector<double> roots;
    double prev = slope(grid[0]);
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const double cur = slope(grid[i]);
        if ((prev > 0.0) != (cur > 0.0)) {
            roots.push_back(numerics::find_root_bracketed(slope, grid[i - 1], grid[i], prev, cur, kRootTol));
        }
        prev = cur;
    }
    if (roots.empty()) {
        return std::nullopt;
    }
    if (roots.size() != 2) {
        throw ModelAssumptionError("expected 0 or 2 stationary points of omega_k, found " +
                                   std::to_string(roots.size()));
    }
    RotonFeatures out{make_stationary(roots[0], p), make_stationary(roots[1], p)};
    if (!(out.maxon.curvature < 0.0) || !(out.roton.curvature > 0.0)) {
        throw ModelAssumptionError("stationary points are not a maximum followed by a minimum");
    }
    return out;
}

double critical_chi_instability(double P) {
    ParamSet p;
    p.P = P;
    p.check();
    double lo = 0.0;
    double hi = 1.0;
    while (is_stable(p.with_chi(hi))) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e8) {
            throw ModelAssumptionError("no instability found below chi = 1e8");
        }
    }
    while (hi - lo > kChiTol) {
        const double mid = 0.5 * (lo + hi);
        if (is_stable(p.with_chi(mid))) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return lo;
}

double critical_chi_roton(double P) {
    ParamSet p;
    p.P = P;
    p.check();
    double hi = critical_chi_instability(P);
    if (!roton_features(p.with_chi(hi))) {
        throw ModelAssumptionError("no roton just below the instability threshold");
    }
    double lo = 0.0;
    while (hi - lo > kChiTol) {
        const double mid = 0.5 * (lo + hi);
        if (roton_features(p.with_chi(mid))) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return hi;
}

std::string_view to_string(Branch b) {
    switch (b) {
    case Branch::Monotone:
        return "monotone";
    case Branch::Phonon:
        return "phonon";
    case Branch::MaxonRoton:
        return "maxon-roton";
    case Branch::FreeParticle:
        return "free-particle";
    }
    return "unknown";
}

std::vector<InverseRoot> inverse_roots(double w, const ParamSet& p) {
    return inverse_roots(w, p, roton_features(p), 1e-10);
}

std::vector<InverseRoot> inverse_roots(double w, const ParamSet& p,
                                       const std::optional<RotonFeatures>& features, double tol) {
    if (!(w > 0.0) || !std::isfinite(w)) {
        throw DomainError("inverse_roots requires omega > 0");
    }
    const auto residual = [&](double k) { return omega(k, p) - w; };

    // Upper bracket on the free-particle tail, beyond the roton minimum.
    double k_hi = std::max(std::sqrt(2.0 * w), 1.0);
    if (features) {
        k_hi = std::max(k_hi, 2.0 * features->roton.k);
    }
    while (residual(k_hi) <= 0.0) {
        k_hi *= 2.0;
    }

    auto solve = [&](double a, double b, Branch branch) {
        const double fa = residual(a);
        const double fb = residual(b);
        if ((fa > 0.0) == (fb > 0.0) || fa == 0.0 || fb == 0.0) {
            throw BoundaryError("omega = " + std::to_string(w) +
                                " is at (or within rounding of) a band edge");
        }
        return InverseRoot{numerics::find_root_bracketed(residual, a, b, fa, fb, tol), branch};
    };

    if (!features) {
        return {solve(0.0, k_hi, Branch::Monotone)};
    }
    const double w_min = features->roton.omega;
    const double w_max = features->maxon.omega;
    if (w == w_min || w == w_max) {
        throw BoundaryError("omega coincides with a band edge of the roton spectrum");
    }
    const double k_M = features->maxon.k;
    const double k_m = features->roton.k;
    if (w < w_min) {
        return {solve(0.0, k_M, Branch::Phonon)};
    }
    if (w > w_max) {
        return {solve(k_m, k_hi, Branch::FreeParticle)};
    }
    return {solve(0.0, k_M, Branch::Phonon), solve(k_M, k_m, Branch::MaxonRoton),
            solve(k_m, k_hi, Branch::FreeParticle)};
}

} // namespace rsense::dispersion
