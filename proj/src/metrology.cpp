#include "rsense/metrology.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "rsense/errors.hpp"

namespace rsense::metrology {

namespace {

// Vertex value of the parabola through three equally spaced samples, used to
// refine a sampled extremum. Falls back to the middle sample when the three
// points do not bracket an extremum of the requested kind.
double refine_extremum(double left, double mid, double right, bool maximum) {
    const double curvature = left - 2.0 * mid + right;
    if (curvature == 0.0 || (maximum && curvature > 0.0) || (!maximum && curvature < 0.0)) {
        return mid;
    }
    const double slope = right - left;
    const double vertex = mid - slope * slope / (8.0 * curvature);
    return maximum ? std::max(vertex, mid) : std::min(vertex, mid);
}

} // namespace

std::vector<double> sample_gamma(const ParamSet& p, double t_max, double dt, unsigned jobs) {
    p.check();
    if (!(dt > 0.0) || !(t_max > 0.0)) {
        throw InvalidParameter("non-Markovianity needs horizon > 0 and dt > 0");
    }
    if (const auto features = dispersion::roton_features(p)) {
        const double limit = std::numbers::pi / (4.0 * features->roton.omega);
        if (dt > limit) {
            throw ResolutionError("dt = " + std::to_string(dt) + " does not resolve the roton period; need dt <= " +
                                  std::to_string(limit));
        }
    }
    const auto steps = static_cast<std::size_t>(std::ceil(t_max / dt - 1e-9));
    const dephasing::ModeTable table(p, dt * static_cast<double>(steps));
    std::vector<double> gamma;
    gamma.reserve(steps + 1);
    for (const auto& v : table.evaluate_grid(0.0, dt, steps + 1, jobs)) {
        gamma.push_back(v.gamma);
    }
    return gamma;
}

double ProbeState::coherence() const { return std::exp(-gamma); }

double ProbeState::sigma_x_variance() const { return -std::expm1(-2.0 * gamma); }

double qfi_from(double gamma, double gamma_dchi) {
    if (!(gamma > 0.0)) {
        return 0.0;
    }
    return gamma_dchi * gamma_dchi / std::expm1(2.0 * gamma);
}

double fisher_sigma_x_from(double gamma, double gamma_dchi) {
    const ProbeState state{gamma};
    const double variance = state.sigma_x_variance();
    if (!(variance > 0.0)) {
        return 0.0;
    }
    const double dmean = -state.sigma_x_mean() * gamma_dchi;
    return dmean * dmean / variance;
}

double qfi(double t, const ParamSet& p, const numerics::QuadSpec& spec) {
    if (t == 0.0) {
        return 0.0;
    }
    return qfi_from(dephasing::gamma(t, p, spec), dephasing::gamma_dchi(t, p, spec));
}

double fisher_sigma_x(double t, const ParamSet& p, const numerics::QuadSpec& spec) {
    if (t == 0.0) {
        return 0.0;
    }
    return fisher_sigma_x_from(dephasing::gamma(t, p, spec), dephasing::gamma_dchi(t, p, spec));
}

EnvelopeCoefficients envelope_coefficients(const ParamSet& p, const numerics::QuadSpec& spec) {
    p.check();
    const auto features = dispersion::roton_features(p);
    if (!features) {
        throw RegimeError("envelope coefficients need a roton spectrum (chi = " + std::to_string(p.chi) + ")");
    }
    const auto approx = dephasing::singular_approx(p, *features);

    EnvelopeCoefficients c;
    c.omega_m = approx.omega_m;
    c.a_m = approx.g_m * features->roton.domega_dchi;
    c.a_M = approx.g_M * features->maxon.domega_dchi;
    c.gamma0 = dephasing::gamma0(p, spec);
    c.gamma0_dchi = dephasing::gamma0_dchi(p, spec);

    const double growth = std::expm1(2.0 * c.gamma0);  // e^{2 Gamma0} - 1
    c.A = std::numbers::pi * c.a_m * c.a_m / growth;
    c.B = 2.0 * std::sqrt(std::numbers::pi) * c.a_m * c.gamma0_dchi / (-growth);
    c.C = c.gamma0_dchi * c.gamma0_dchi / growth;
    return c;
}

double qfi_tilde(double t, const EnvelopeCoefficients& c) {
    const double s = std::sin(c.omega_m * t + 0.25 * std::numbers::pi);
    return c.A * t * s * s - c.B * std::sqrt(t) * s + c.C;
}

double qfi_envelope(double t, const EnvelopeCoefficients& c) { return c.A * t + c.B * std::sqrt(t) + c.C; }

std::vector<LocalOptimum> local_optimal_times(const EnvelopeCoefficients& c, int n_max) {
    if (n_max < 1) {
        throw InvalidParameter("n_max must be at least 1");
    }
    if (!(c.omega_m > 0.0)) {
        throw InvalidParameter("omega_m must be positive");
    }
    std::vector<LocalOptimum> out;
    out.reserve(static_cast<std::size_t>(n_max));
    for (int n = 1; n <= n_max; ++n) {
        const double t = (2.0 * n + 1.25) * std::numbers::pi / c.omega_m;
        out.push_back({n, t, qfi_envelope(t, c)});
    }
    return out;
}

std::vector<double> non_markovianity_profile(std::span<const double> gamma) {
    std::vector<double> profile(gamma.size(), 0.0);
    if (gamma.empty()) {
        return profile;
    }
    double completed = 0.0;
    bool in_run = false;
    double run_start = 0.0;  // e^{-Gamma} at the refined local maximum
    for (std::size_t i = 1; i < gamma.size(); ++i) {
        const bool decreasing = gamma[i] < gamma[i - 1];
        if (decreasing && !in_run) {
            const std::size_t top = i - 1;
            const double peak = (top > 0) ? refine_extremum(gamma[top - 1], gamma[top], gamma[i], true)
                                          : gamma[top];
            run_start = std::exp(-peak);
            in_run = true;
        } else if (!decreasing && in_run) {
            const std::size_t bottom = i - 1;
            const double trough = refine_extremum(gamma[bottom - 1], gamma[bottom], gamma[i], false);
            completed += std::exp(-trough) - run_start;
            in_run = false;
        }
        profile[i] = completed + (in_run ? std::exp(-gamma[i]) - run_start : 0.0);
    }
    return profile;
}

double non_markovianity_from_samples(std::span<const double> gamma) {
    const auto profile = non_markovianity_profile(gamma);
    return profile.empty() ? 0.0 : profile.back();
}

double non_markovianity(const ParamSet& p, double horizon, double dt, unsigned jobs) {
    return non_markovianity(p, std::vector<double>{horizon}, dt, jobs).front();
}

std::vector<double> non_markovianity(const ParamSet& p, const std::vector<double>& horizons, double dt,
                                     unsigned jobs) {
    if (horizons.empty()) {
        throw InvalidParameter("at least one horizon is required");
    }
    const double t_max = *std::max_element(horizons.begin(), horizons.end());
    const auto gamma = sample_gamma(p, t_max, dt, jobs);
    const auto profile = non_markovianity_profile(gamma);
    std::vector<double> out;
    out.reserve(horizons.size());
    for (double h : horizons) {
        if (!(h > 0.0)) {
            throw InvalidParameter("horizons must be positive");
        }
        const auto idx = std::min(profile.size() - 1, static_cast<std::size_t>(std::llround(h / dt)));
        out.push_back(profile[idx]);
    }
    return out;
}

std::vector<Peak> local_maxima(std::span<const double> t, std::span<const double> y, double half_window) {
    if (t.size() != y.size()) {
        throw InvalidParameter("local_maxima: t and y differ in length");
    }
    std::vector<Peak> out;
    for (std::size_t i = 1; i + 1 < y.size(); ++i) {
        if (!(y[i] > y[i - 1] && y[i] >= y[i + 1])) {
            continue;
        }
        bool dominant = true;
        for (std::size_t j = i; j-- > 0 && t[i] - t[j] <= half_window;) {
            if (y[j] > y[i]) {
                dominant = false;
                break;
            }
        }
        for (std::size_t j = i + 1; dominant && j < y.size() && t[j] - t[i] <= half_window; ++j) {
            if (y[j] > y[i]) {
                dominant = false;
            }
        }
        if (dominant) {
            out.push_back({i, t[i], y[i]});
        }
    }
    return out;
}

} // namespace rsense::metrology
