#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

namespace rsense::numerics {

using Function = std::function<double(double)>;

struct QuadSpec {
    double rel_tol = 1e-8;
    double abs_tol = 1e-12;
    std::size_t max_panels = 1u << 21;
    /// Oscillation time scale; when set, panels are narrowed so that each sees at
    /// most 1/8 of a period of cos(omega(k) t).
    std::optional<double> osc_time;

    void validate() const;
};

struct QuadResult {
    double value = 0.0;
    double error = 0.0;
    std::size_t panels = 0;
};

/// Scaled complementary error function exp(x^2) erfc(x).
double erfcx(double x);

/// Truncation point of a Gaussian envelope exp(-k^2 / (2 s^2)) at 1e-16 relative.
double gaussian_cutoff(double decay_scale);

/// 15-point Gauss-Kronrod rule with embedded 7-point Gauss rule.
struct KronrodRule {
    static constexpr int size = 15;
    /// Abscissae on [-1, 1] in ascending order.
    static const double nodes[size];
    static const double kronrod_weights[size];
    /// Zero on the Kronrod-only nodes.
    static const double gauss_weights[size];
};

/// Adaptive Gauss-Kronrod integration over [a, b] starting from the given
/// breakpoints (sorted, spanning [a, b]). Bisects the worst panel first; ties
/// go to the leftmost panel so that results are bit-reproducible.
QuadResult integrate_adaptive(const Function& f, const std::vector<double>& breakpoints,
                              const QuadSpec& spec);

QuadResult integrate(const Function& f, double a, double b, const QuadSpec& spec = {});

/// Integral over (0, inf) of an integrand carrying a Gaussian envelope of width
/// decay_scale; truncated where the envelope drops below 1e-16.
QuadResult integrate_semiinfinite(const Function& f, double decay_scale, const QuadSpec& spec = {});

/// Breakpoints on [a, b] such that every panel satisfies
/// width * t * max|phase_rate| <= pi / 4, at least `min_panels` panels.
std::vector<double> oscillation_partition(const Function& phase_rate, double a, double b, double t,
                                          std::size_t min_panels, std::size_t max_panels);

/// Semi-infinite integral of an integrand oscillating like cos(omega(k) t), where
/// phase_rate(k) = d omega / dk. t = 0 reduces to integrate_semiinfinite.
QuadResult integrate_oscillatory(const Function& f, const Function& phase_rate, double t,
                                 double decay_scale, const QuadSpec& spec = {});

/// Brent's method. Requires f(a) f(b) <= 0; never evaluates outside [a, b].
double find_root_bracketed(const Function& f, double a, double b, double tol);

/// Brent's method on a precomputed bracket value pair.
double find_root_bracketed(const Function& f, double a, double b, double fa, double fb, double tol);

/// Central difference (f(x+h) - f(x-h)) / 2h with one Richardson step (h, h/2).
double central_diff(const Function& f, double x, double h);

/// Golden-section / parabolic minimization on [a, b] (Brent). Returns the abscissa.
double minimize_bracketed(const Function& f, double a, double b, double tol);

/// n points log-spaced on [lo, hi], both endpoints included.
std::vector<double> logspace(double lo, double hi, std::size_t n);

} // namespace rsense::numerics
