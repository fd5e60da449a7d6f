#include "rsense/dephasing.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <optional>
#include <numbers>
#include <string>
#include <thread>

#include "rsense/errors.hpp"

namespace rsense::dephasing {

namespace {

using numerics::Function;
using numerics::QuadSpec;

// Below this u (omega - edge = u^2 < 1e-8) the transformed band-edge integrand
// is replaced by its limit, the singularity weight g of that edge.
constexpr double kEdgeLimitU = 1e-4;

// Q is a prefactor and may be zero here (zero coupling); everything else must
// be a valid model point.
void check_point(const ParamSet& p) {
    if (p.Q == 0.0) {
        p.with_Q(1.0).check();
    } else {
        p.check();
    }
}

// d omega / dk with its k -> 0 limit (sound velocity) filled in.
double group_velocity(double k, const ParamSet& p) {
    if (k == 0.0) {
        return 0.5 * std::sqrt(p.P * (1.0 + 2.0 * p.chi));
    }
    return dispersion::omega_dk(k, p);
}

// 2 sin^2(x/2), the cancellation-free form of 1 - cos x.
double one_minus_cos(double x) {
    const double s = std::sin(0.5 * x);
    return 2.0 * s * s;
}

double gamma_integrand(double k, double t, const ParamSet& p) {
    const double w = dispersion::omega(k, p);
    return mode_weight(k, p) * one_minus_cos(w * t) / (w * w * w);
}

double gamma_dchi_integrand(double k, double t, const ParamSet& p) {
    const double w = dispersion::omega(k, p);
    const double w3 = w * w * w;
    const double bracket = t * std::sin(w * t) / w3 - 3.0 * one_minus_cos(w * t) / (w3 * w);
    return mode_weight(k, p) * bracket * dispersion::omega_dchi(k, p);
}

double k_integral(const Function& f, double t, const ParamSet& p, const QuadSpec& spec) {
    const auto rate = [&](double k) { return group_velocity(k, p); };
    return numerics::integrate_oscillatory(f, rate, t, 1.0 / p.zeta, spec).value;
}

// Contribution of one spectral branch to G(omega).
double branch_density(double w, dispersion::Branch branch, const ParamSet& p,
                      const std::optional<dispersion::RotonFeatures>& features) {
    for (const auto& root : dispersion::inverse_roots(w, p, features, 1e-15)) {
        if (root.branch == branch) {
            const double slope = std::abs(dispersion::omega_dk(root.k, p));
            return p.Q * mode_weight(root.k, p) / (w * w * w * slope);
        }
    }
    throw ModelAssumptionError("branch " + std::string(dispersion::to_string(branch)) +
                               " has no root at omega = " + std::to_string(w));
}

enum class Edge { Lower, Upper };

// int over [lo, hi] of g(omega) cos(omega t), with an inverse-square-root
// singularity of g at the given edge. Substitutes omega = edge +- u^2.
double edge_singular_integral(const Function& g, double lo, double hi, Edge edge, double edge_limit,
                              double t, const QuadSpec& spec) {
    const double u_max = std::sqrt(hi - lo);
    const auto transformed = [&](double u) {
        const double w = (edge == Edge::Lower) ? lo + u * u : hi - u * u;
        const double jac_g = (u < kEdgeLimitU) ? edge_limit : 2.0 * u * g(w);
        return jac_g * std::cos(w * t);
    };
    const auto rate = [](double u) { return 2.0 * u; };
    const auto breakpoints = numerics::oscillation_partition(rate, 0.0, u_max, t, 16, spec.max_panels);
    return numerics::integrate_adaptive(transformed, breakpoints, spec).value;
}

double regular_integral(const Function& g, double lo, double hi, double t, const QuadSpec& spec) {
    const auto integrand = [&](double w) { return g(w) * std::cos(w * t); };
    const auto rate = [](double) { return 1.0; };
    const auto breakpoints = numerics::oscillation_partition(rate, lo, hi, t, 16, spec.max_panels);
    return numerics::integrate_adaptive(integrand, breakpoints, spec).value;
}

} // namespace

double mode_weight(double k, const ParamSet& p) {
    return k * k * k * std::exp(-0.5 * p.zeta * p.zeta * k * k);
}

double k_cutoff(const ParamSet& p) { return numerics::gaussian_cutoff(1.0 / p.zeta); }

double gamma0(const ParamSet& p, const QuadSpec& spec) {
    check_point(p);
    if (p.Q == 0.0) {
        return 0.0;
    }
    const auto f = [&](double k) {
        const double w = dispersion::omega(k, p);
        return mode_weight(k, p) / (w * w * w);
    };
    return p.Q * numerics::integrate_semiinfinite(f, 1.0 / p.zeta, spec).value;
}

double gamma0_dchi(const ParamSet& p, const QuadSpec& spec) {
    check_point(p);
    if (p.Q == 0.0) {
        return 0.0;
    }
    const auto f = [&](double k) {
        const double w = dispersion::omega(k, p);
        return mode_weight(k, p) * dispersion::omega_dchi(k, p) / (w * w * w * w);
    };
    return -3.0 * p.Q * numerics::integrate_semiinfinite(f, 1.0 / p.zeta, spec).value;
}

double gamma(double t, const ParamSet& p, const QuadSpec& spec) {
    check_point(p);
    if (!(t >= 0.0)) {
        throw DomainError("gamma requires t >= 0");
    }
    if (t == 0.0 || p.Q == 0.0) {
        return 0.0;
    }
    try {
        return p.Q * k_integral([&](double k) { return gamma_integrand(k, t, p); }, t, p, spec);
    } catch (const QuadratureFailure& e) {
        throw QuadratureFailure(std::string(e.what()) + " [gamma at t = " + std::to_string(t) +
                                    ", chi = " + std::to_string(p.chi) + "]",
                                e.worst_panel_lo(), e.worst_panel_hi(), e.worst_panel_error());
    }
}

double gamma_dchi(double t, const ParamSet& p, const QuadSpec& spec) {
    check_point(p);
    if (!(t >= 0.0)) {
        throw DomainError("gamma_dchi requires t >= 0");
    }
    if (t == 0.0 || p.Q == 0.0) {
        return 0.0;
    }
    try {
        return p.Q * k_integral([&](double k) { return gamma_dchi_integrand(k, t, p); }, t, p, spec);
    } catch (const QuadratureFailure& e) {
        throw QuadratureFailure(std::string(e.what()) + " [dgamma/dchi at t = " + std::to_string(t) +
                                    ", chi = " + std::to_string(p.chi) + "]",
                                e.worst_panel_lo(), e.worst_panel_hi(), e.worst_panel_error());
    }
}

double gamma1(double t, const ParamSet& p, const QuadSpec& spec) {
    return gamma(t, p, spec) - gamma0(p, spec);
}

double spectral_density(double w, const ParamSet& p) {
    p.check();
    const auto features = dispersion::roton_features(p);
    double total = 0.0;
    for (const auto& root : dispersion::inverse_roots(w, p, features, 1e-14)) {
        const double slope = std::abs(dispersion::omega_dk(root.k, p));
        total += mode_weight(root.k, p) / (w * w * w * slope);
    }
    return p.Q * total;
}

double gamma1_spectral(double t, const ParamSet& p, const QuadSpec& spec) {
    p.check();
    if (!(t >= 0.0)) {
        throw DomainError("gamma1_spectral requires t >= 0");
    }
    using dispersion::Branch;
    const auto features = dispersion::roton_features(p);
    const double w_cut = dispersion::omega(k_cutoff(p), p);
    const auto density = [&](Branch b) {
        return [&, b](double w) { return branch_density(w, b, p, features); };
    };

    if (!features) {
        return -regular_integral(density(Branch::Monotone), 0.0, w_cut, t, spec);
    }
    const SpectralApprox edges = singular_approx(p, *features);
    const double w_m = edges.omega_m;
    const double w_M = edges.omega_M;
    const double mid = 0.5 * (w_m + w_M);

    double total = 0.0;
    total += edge_singular_integral(density(Branch::Phonon), 0.0, w_M, Edge::Upper, edges.g_M, t, spec);
    total += edge_singular_integral(density(Branch::MaxonRoton), w_m, mid, Edge::Lower, edges.g_m, t, spec);
    total += edge_singular_integral(density(Branch::MaxonRoton), mid, w_M, Edge::Upper, edges.g_M, t, spec);
    total += edge_singular_integral(density(Branch::FreeParticle), w_m, w_cut, Edge::Lower, edges.g_m, t, spec);
    return -total;
}

SpectralApprox singular_approx(const ParamSet& p) {
    p.check();
    const auto features = dispersion::roton_features(p);
    if (!features) {
        throw RegimeError("singular approximation needs a roton spectrum (chi = " +
                          std::to_string(p.chi) + " has none)");
    }
    return singular_approx(p, *features);
}

SpectralApprox singular_approx(const ParamSet& p, const dispersion::RotonFeatures& f) {
    SpectralApprox out;
    out.omega_m = f.roton.omega;
    out.omega_M = f.maxon.omega;
    out.g_m = p.Q * std::sqrt(2.0 / f.roton.curvature) * mode_weight(f.roton.k, p) /
              (out.omega_m * out.omega_m * out.omega_m);
    out.g_M = p.Q * std::sqrt(2.0 / std::abs(f.maxon.curvature)) * mode_weight(f.maxon.k, p) /
              (out.omega_M * out.omega_M * out.omega_M);
    return out;
}

double gamma1_tilde(double t, const SpectralApprox& a) {
    if (!(t > 0.0)) {
        throw DomainError("gamma1_tilde is singular at t <= 0");
    }
    constexpr double kQuarterPi = 0.25 * std::numbers::pi;
    return -std::sqrt(std::numbers::pi / t) *
           (a.g_m * std::cos(a.omega_m * t + kQuarterPi) + a.g_M * std::cos(a.omega_M * t - kQuarterPi));
}

ModeTable::ModeTable(const ParamSet& p, double t_max) : params_(p), t_max_(t_max) {
    check_point(p);
    if (!(t_max >= 0.0) || !std::isfinite(t_max)) {
        throw DomainError("ModeTable requires a finite t_max >= 0");
    }
    const auto rate = [&](double k) { return group_velocity(k, p); };
    std::vector<double> breakpoints;
    try {
        breakpoints = numerics::oscillation_partition(rate, 0.0, k_cutoff(p), t_max, 256, std::size_t{1} << 23);
    } catch (const QuadratureFailure& e) {
        throw QuadratureFailure(std::string(e.what()) + " [mode table at t = " + std::to_string(t_max) + "]",
                                e.worst_panel_lo(), e.worst_panel_hi(), e.worst_panel_error());
    }

    const std::size_t n = (breakpoints.size() - 1) * numerics::KronrodRule::size;
    omega_.reserve(n);
    amp_.reserve(n);
    amp_dchi_.reserve(n);
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
        const double center = 0.5 * (breakpoints[i] + breakpoints[i + 1]);
        const double half = 0.5 * (breakpoints[i + 1] - breakpoints[i]);
        for (int j = 0; j < numerics::KronrodRule::size; ++j) {
            const double k = center + half * numerics::KronrodRule::nodes[j];
            const double weight = half * numerics::KronrodRule::kronrod_weights[j];
            const double w = dispersion::omega(k, p);
            const double a = weight * p.Q * mode_weight(k, p) / (w * w * w);
            omega_.push_back(w);
            amp_.push_back(a);
            amp_dchi_.push_back(a * dispersion::omega_dchi(k, p));
        }
    }
    for (std::size_t i = 0; i < omega_.size(); ++i) {
        gamma0_ += amp_[i];
        gamma0_dchi_ -= 3.0 * amp_dchi_[i] / omega_[i];
    }
}

GammaValue ModeTable::evaluate(double t) const {
    if (!(t >= 0.0) || t > t_max_ * (1.0 + 1e-12)) {
        throw DomainError("t = " + std::to_string(t) + " outside the table range [0, " +
                          std::to_string(t_max_) + "]");
    }
    GammaValue out;
    for (std::size_t i = 0; i < omega_.size(); ++i) {
        const double w = omega_[i];
        const double half_phase = 0.5 * w * t;
        const double s = std::sin(half_phase);
        const double c = std::cos(half_phase);
        const double omc = 2.0 * s * s;  // 1 - cos(w t)
        const double sn = 2.0 * s * c;   // sin(w t)
        out.gamma += amp_[i] * omc;
        out.gamma_dchi += amp_dchi_[i] * (t * sn - 3.0 * omc / w);
    }
    return out;
}

std::vector<GammaValue> ModeTable::evaluate(const std::vector<double>& times, unsigned jobs) const {
    std::vector<GammaValue> out(times.size());
    jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(times.size(), 1))));
    if (jobs == 1) {
        for (std::size_t i = 0; i < times.size(); ++i) {
            out[i] = evaluate(times[i]);
        }
        return out;
    }
    std::vector<std::thread> workers;
    std::vector<std::exception_ptr> errors(jobs);
    const std::size_t chunk = (times.size() + jobs - 1) / jobs;
    for (unsigned j = 0; j < jobs; ++j) {
        workers.emplace_back([&, j] {
            try {
                const std::size_t begin = j * chunk;
                const std::size_t end = std::min(times.size(), begin + chunk);
                for (std::size_t i = begin; i < end; ++i) {
                    out[i] = evaluate(times[i]);
                }
            } catch (...) {
                errors[j] = std::current_exception();
            }
        });
    }
    for (auto& w : workers) {
        w.join();
    }
    for (const auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
    return out;
}

void ModeTable::evaluate_block(double t_start, double dt, const std::vector<double>& rot_sin,
                               const std::vector<double>& rot_cos, std::size_t count, GammaValue* out) const {
    double gamma[kBlock] = {};
    double gamma_dchi[kBlock] = {};
    for (std::size_t i = 0; i < omega_.size(); ++i) {
        const double w = omega_[i];
        const double a = amp_[i];
        const double ad = amp_dchi_[i];
        const double inv_w = 3.0 / w;
        double s = std::sin(0.5 * w * t_start);
        double c = std::cos(0.5 * w * t_start);
        const double rs = rot_sin[i];
        const double rc = rot_cos[i];
        for (std::size_t j = 0; j < count; ++j) {
            const double t = t_start + dt * static_cast<double>(j);
            const double omc = 2.0 * s * s;
            const double sn = 2.0 * s * c;
            gamma[j] += a * omc;
            gamma_dchi[j] += ad * (t * sn - inv_w * omc);
            const double s_next = s * rc + c * rs;
            c = c * rc - s * rs;
            s = s_next;
        }
    }
    for (std::size_t j = 0; j < count; ++j) {
        out[j] = {gamma[j], gamma_dchi[j]};
    }
}

std::vector<GammaValue> ModeTable::evaluate_grid(double t_min, double dt, std::size_t steps, unsigned jobs) const {
    if (steps == 0) {
        return {};
    }
    const double t_last = t_min + dt * static_cast<double>(steps - 1);
    if (!(t_min >= 0.0) || !(dt > 0.0) || t_last > t_max_ * (1.0 + 1e-12)) {
        throw DomainError("uniform grid [" + std::to_string(t_min) + ", " + std::to_string(t_last) +
                          "] outside the table range [0, " + std::to_string(t_max_) + "]");
    }
    std::vector<double> rot_sin(omega_.size());
    std::vector<double> rot_cos(omega_.size());
    for (std::size_t i = 0; i < omega_.size(); ++i) {
        rot_sin[i] = std::sin(0.5 * omega_[i] * dt);
        rot_cos[i] = std::cos(0.5 * omega_[i] * dt);
    }
    std::vector<GammaValue> out(steps);
    const std::size_t blocks = (steps + kBlock - 1) / kBlock;
    auto run_blocks = [&](std::size_t first, std::size_t last) {
        for (std::size_t b = first; b < last; ++b) {
            const std::size_t begin = b * kBlock;
            const std::size_t count = std::min(kBlock, steps - begin);
            evaluate_block(t_min + dt * static_cast<double>(begin), dt, rot_sin, rot_cos, count, &out[begin]);
        }
    };
    jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(blocks)));
    if (jobs == 1) {
        run_blocks(0, blocks);
        return out;
    }
    std::vector<std::thread> workers;
    const std::size_t per = (blocks + jobs - 1) / jobs;
    for (unsigned j = 0; j < jobs; ++j) {
        const std::size_t first = std::min(blocks, j * per);
        const std::size_t last = std::min(blocks, first + per);
        workers.emplace_back(run_blocks, first, last);
    }
    for (auto& w : workers) {
        w.join();
    }
    return out;
}

std::vector<double> time_grid(double t_min, double t_max, std::size_t steps) {
    if (steps < 2 || !(t_max > t_min) || !(t_min >= 0.0)) {
        throw InvalidParameter("time grid needs 0 <= t_min < t_max and at least 2 steps");
    }
    std::vector<double> out(steps);
    const double dt = (t_max - t_min) / static_cast<double>(steps - 1);
    for (std::size_t i = 0; i < steps; ++i) {
        out[i] = t_min + dt * static_cast<double>(i);
    }
    out.back() = t_max;
    return out;
}

} // namespace rsense::dephasing
