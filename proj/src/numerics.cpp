#include "rsense/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <string>

#include "rsense/errors.hpp"

namespace rsense::numerics {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kTiny = std::numeric_limits<double>::min();

// exp(-k^2/(2 s^2)) = 1e-16  <=>  k = s sqrt(2 ln 1e16)
const double kGaussianCutoffFactor = std::sqrt(2.0 * 16.0 * std::numbers::ln10);

struct Panel {
    double a;
    double b;
    double value;
    double error;
};

Panel kronrod_panel(const Function& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double fv[KronrodRule::size];
    double kron = 0.0;
    double gauss = 0.0;
    double resabs = 0.0;
    for (int i = 0; i < KronrodRule::size; ++i) {
        fv[i] = f(center + half * KronrodRule::nodes[i]);
        kron += KronrodRule::kronrod_weights[i] * fv[i];
        gauss += KronrodRule::gauss_weights[i] * fv[i];
        resabs += KronrodRule::kronrod_weights[i] * std::abs(fv[i]);
    }
    const double mean = 0.5 * kron;
    double resasc = 0.0;
    for (int i = 0; i < KronrodRule::size; ++i) {
        resasc += KronrodRule::kronrod_weights[i] * std::abs(fv[i] - mean);
    }
    const double habs = std::abs(half);
    kron *= half;
    gauss *= half;
    resabs *= habs;
    resasc *= habs;

    // QUADPACK error scaling for the (G7, K15) pair.
    double err = std::abs(kron - gauss);
    if (resasc != 0.0 && err != 0.0) {
        err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    }
    if (resabs > kTiny / (50.0 * kEps)) {
        err = std::max(50.0 * kEps * resabs, err);
    }
    if (!std::isfinite(kron)) {
        throw DomainError("integrand is not finite on panel [" + std::to_string(a) + ", " +
                          std::to_string(b) + "]");
    }
    return {a, b, kron, err};
}

struct WorstFirst {
    bool operator()(const Panel& lhs, const Panel& rhs) const {
        if (lhs.error != rhs.error) {
            return lhs.error < rhs.error;
        }
        return lhs.a > rhs.a;
    }
};

} // namespace

const double KronrodRule::nodes[KronrodRule::size] = {
    -0.991455371120812639206854697526329, -0.949107912342758524526189684047851,
    -0.864864423359769072789712788640926, -0.741531185599394439863864773280788,
    -0.586087235467691130294144845693013, -0.405845151377397166906606412076961,
    -0.207784955007898467600689403773245, 0.0,
    0.207784955007898467600689403773245,  0.405845151377397166906606412076961,
    0.586087235467691130294144845693013,  0.741531185599394439863864773280788,
    0.864864423359769072789712788640926,  0.949107912342758524526189684047851,
    0.991455371120812639206854697526329,
};

const double KronrodRule::kronrod_weights[KronrodRule::size] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
    0.204432940075298892414161999234649, 0.190350578064785409913256402421014,
    0.169004726639267902826583426598550, 0.140653259715525918745189590510238,
    0.104790010322250183839876322541518, 0.063092092629978553290700663189204,
    0.022935322010529224963732008058970,
};

const double KronrodRule::gauss_weights[KronrodRule::size] = {
    0.0, 0.129484966168869693270611432679082,
    0.0, 0.279705391489276667901467771423780,
    0.0, 0.381830050505118944950369775488975,
    0.0, 0.417959183673469387755102040816327,
    0.0, 0.381830050505118944950369775488975,
    0.0, 0.279705391489276667901467771423780,
    0.0, 0.129484966168869693270611432679082,
    0.0,
};

void QuadSpec::validate() const {
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) {
        throw InvalidParameter("quadrature tolerances must be positive");
    }
    if (max_panels < 64) {
        throw InvalidParameter("quadrature max_panels must be at least 64");
    }
    if (osc_time && !(*osc_time >= 0.0)) {
        throw InvalidParameter("oscillation time must be non-negative");
    }
}

double erfcx(double x) {
    if (x < 12.0) {
        return std::exp(x * x) * std::erfc(x);
    }
    // Continued fraction erfcx(x) = 1 / (sqrt(pi) (x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))),
    // evaluated backwards; 60 terms exceed double precision for x >= 12.
    double tail = x;
    for (int n = 60; n >= 1; --n) {
        tail = x + 0.5 * n / tail;
    }
    return 1.0 / (std::sqrt(std::numbers::pi) * tail);
}

double gaussian_cutoff(double decay_scale) {
    if (!(decay_scale > 0.0)) {
        throw InvalidParameter("decay scale must be positive");
    }
    return decay_scale * kGaussianCutoffFactor;
}

QuadResult integrate_adaptive(const Function& f, const std::vector<double>& breakpoints,
                              const QuadSpec& spec) {
    spec.validate();
    if (breakpoints.size() < 2) {
        throw InvalidParameter("integration needs at least two breakpoints");
    }

    std::priority_queue<Panel, std::vector<Panel>, WorstFirst> queue;
    double total = 0.0;
    double total_err = 0.0;
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
        Panel p = kronrod_panel(f, breakpoints[i], breakpoints[i + 1]);
        total += p.value;
        total_err += p.error;
        queue.push(p);
    }

    auto converged = [&] { return total_err <= spec.rel_tol * std::abs(total) + spec.abs_tol; };

    while (!converged()) {
        if (queue.size() >= spec.max_panels) {
            const Panel& worst = queue.top();
            throw QuadratureFailure("adaptive quadrature exceeded " +
                                        std::to_string(spec.max_panels) +
                                        " panels; raise max_panels",
                                    worst.a, worst.b, worst.error);
        }
        Panel worst = queue.top();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) {
            throw QuadratureFailure("panel can no longer be bisected (roundoff limit)", worst.a,
                                    worst.b, worst.error);
        }
        queue.pop();
        Panel left = kronrod_panel(f, worst.a, mid);
        Panel right = kronrod_panel(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        queue.push(left);
        queue.push(right);
    }

    // Re-sum in a fixed left-to-right order; the running total above is only a
    // convergence monitor.
    std::vector<Panel> panels;
    panels.reserve(queue.size());
    while (!queue.empty()) {
        panels.push_back(queue.top());
        queue.pop();
    }
    std::sort(panels.begin(), panels.end(), [](const Panel& l, const Panel& r) { return l.a < r.a; });
    QuadResult result;
    for (const Panel& p : panels) {
        result.value += p.value;
        result.error += p.error;
    }
    result.panels = panels.size();
    return result;
}

QuadResult integrate(const Function& f, double a, double b, const QuadSpec& spec) {
    return integrate_adaptive(f, {a, b}, spec);
}

QuadResult integrate_semiinfinite(const Function& f, double decay_scale, const QuadSpec& spec) {
    const double cut = gaussian_cutoff(decay_scale);
    std::vector<double> breakpoints(17);
    for (std::size_t i = 0; i < breakpoints.size(); ++i) {
        breakpoints[i] = cut * static_cast<double>(i) / 16.0;
    }
    return integrate_adaptive(f, breakpoints, spec);
}

std::vector<double> oscillation_partition(const Function& phase_rate, double a, double b, double t,
                                          std::size_t min_panels, std::size_t max_panels) {
    if (!(b > a)) {
        throw InvalidParameter("partition interval must satisfy a < b");
    }
    if (!(t >= 0.0)) {
        throw DomainError("oscillation time must be non-negative");
    }
    min_panels = std::max<std::size_t>(min_panels, 1);
    constexpr double kMaxPhase = std::numbers::pi / 4.0;

    std::vector<double> out;
    out.reserve(min_panels + 1);
    out.push_back(a);
    // Depth-first over a stack of pending panels keeps the output ordered.
    std::vector<std::pair<double, double>> stack;
    for (std::size_t i = min_panels; i-- > 0;) {
        const double lo = a + (b - a) * static_cast<double>(i) / static_cast<double>(min_panels);
        const double hi =
            (i + 1 == min_panels) ? b
                                  : a + (b - a) * static_cast<double>(i + 1) / static_cast<double>(min_panels);
        stack.emplace_back(lo, hi);
    }
    while (!stack.empty()) {
        auto [lo, hi] = stack.back();
        stack.pop_back();
        const double mid = 0.5 * (lo + hi);
        const double rate = std::max({std::abs(phase_rate(lo)), std::abs(phase_rate(mid)),
                                      std::abs(phase_rate(hi))});
        const double phase = (hi - lo) * t * rate;
        if (phase <= kMaxPhase) {
            out.push_back(hi);
            if (out.size() - 1 > max_panels) {
                throw QuadratureFailure("oscillatory partition exceeds max_panels=" +
                                            std::to_string(max_panels) +
                                            "; raise max_panels for this time",
                                        lo, hi, 0.0);
            }
            continue;
        }
        const auto pieces = static_cast<std::size_t>(std::ceil(phase / kMaxPhase));
        if (pieces + out.size() + stack.size() > 2 * max_panels + 2) {
            throw QuadratureFailure("oscillatory partition exceeds max_panels=" +
                                        std::to_string(max_panels) +
                                        "; raise max_panels for this time",
                                    lo, hi, 0.0);
        }
        const double width = (hi - lo) / static_cast<double>(pieces);
        for (std::size_t i = pieces; i-- > 0;) {
            const double plo = lo + width * static_cast<double>(i);
            const double phi = (i + 1 == pieces) ? hi : lo + width * static_cast<double>(i + 1);
            stack.emplace_back(plo, phi);
        }
    }
    return out;
}

QuadResult integrate_oscillatory(const Function& f, const Function& phase_rate, double t,
                                 double decay_scale, const QuadSpec& spec) {
    if (!(t >= 0.0)) {
        throw DomainError("integrate_oscillatory requires t >= 0");
    }
    if (t == 0.0) {
        return integrate_semiinfinite(f, decay_scale, spec);
    }
    const double cut = gaussian_cutoff(decay_scale);
    const auto breakpoints = oscillation_partition(phase_rate, 0.0, cut, t, 16, spec.max_panels);
    return integrate_adaptive(f, breakpoints, spec);
}

double find_root_bracketed(const Function& f, double a, double b, double tol) {
    return find_root_bracketed(f, a, b, f(a), f(b), tol);
}

double find_root_bracketed(const Function& f, double a, double b, double fa, double fb, double tol) {
    if (fa == 0.0) {
        return a;
    }
    if (fb == 0.0) {
        return b;
    }
    if ((fa > 0.0) == (fb > 0.0)) {
        throw BracketError("no sign change on [" + std::to_string(a) + ", " + std::to_string(b) + "]");
    }
    double c = b;
    double fc = fb;
    double d = b - a;
    double e = d;
    for (int iter = 0; iter < 200; ++iter) {
        if ((fb > 0.0) == (fc > 0.0)) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if (std::abs(fc) < std::abs(fb)) {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        const double tol1 = 2.0 * kEps * std::abs(b) + 0.5 * tol;
        const double xm = 0.5 * (c - b);
        if (std::abs(xm) <= tol1 || fb == 0.0) {
            return b;
        }
        if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
            // Inverse quadratic interpolation, or secant when only two points differ.
            double p;
            double q;
            const double s = fb / fa;
            if (a == c) {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                const double qq = fa / fc;
                const double r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0.0) {
                q = -q;
            }
            p = std::abs(p);
            const double min1 = 3.0 * xm * q - std::abs(tol1 * q);
            const double min2 = std::abs(e * q);
            if (2.0 * p < std::min(min1, min2)) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += (std::abs(d) > tol1) ? d : std::copysign(tol1, xm);
        fb = f(b);
    }
    return b;
}

double central_diff(const Function& f, double x, double h) {
    if (!(h > 0.0)) {
        throw InvalidParameter("finite-difference step must be positive");
    }
    const double coarse = (f(x + h) - f(x - h)) / (2.0 * h);
    const double half = 0.5 * h;
    const double fine = (f(x + half) - f(x - half)) / (2.0 * half);
    return (4.0 * fine - coarse) / 3.0;
}

double minimize_bracketed(const Function& f, double a, double b, double tol) {
    constexpr double kGolden = 0.3819660112501051;
    double x = a + kGolden * (b - a);
    double w = x;
    double v = x;
    double fx = f(x);
    double fw = fx;
    double fv = fx;
    double d = 0.0;
    double e = 0.0;
    for (int iter = 0; iter < 200; ++iter) {
        const double xm = 0.5 * (a + b);
        const double tol1 = tol + 1e-3 * kEps * std::abs(x);
        const double tol2 = 2.0 * tol1;
        if (std::abs(x - xm) <= tol2 - 0.5 * (b - a)) {
            break;
        }
        bool golden = true;
        if (std::abs(e) > tol1) {
            double r = (x - w) * (fx - fv);
            double q = (x - v) * (fx - fw);
            double p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if (q > 0.0) {
                p = -p;
            }
            q = std::abs(q);
            const double etemp = e;
            e = d;
            if (std::abs(p) < std::abs(0.5 * q * etemp) && p > q * (a - x) && p < q * (b - x)) {
                d = p / q;
                const double u = x + d;
                if (u - a < tol2 || b - u < tol2) {
                    d = std::copysign(tol1, xm - x);
                }
                golden = false;
            }
        }
        if (golden) {
            e = (x >= xm) ? a - x : b - x;
            d = kGolden * e;
        }
        const double u = (std::abs(d) >= tol1) ? x + d : x + std::copysign(tol1, d);
        const double fu = f(u);
        if (fu <= fx) {
            if (u >= x) {
                a = x;
            } else {
                b = x;
            }
            v = w;
            fv = fw;
            w = x;
            fw = fx;
            x = u;
            fx = fu;
        } else {
            if (u < x) {
                a = u;
            } else {
                b = u;
            }
            if (fu <= fw || w == x) {
                v = w;
                fv = fw;
                w = u;
                fw = fu;
            } else if (fu <= fv || v == x || v == w) {
                v = u;
                fv = fu;
            }
        }
    }
    return x;
}

std::vector<double> logspace(double lo, double hi, std::size_t n) {
    if (!(lo > 0.0) || !(hi > lo) || n < 2) {
        throw InvalidParameter("logspace needs 0 < lo < hi and n >= 2");
    }
    std::vector<double> out(n);
    const double llo = std::log(lo);
    const double step = (std::log(hi) - llo) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = std::exp(llo + step * static_cast<double>(i));
    }
    out.front() = lo;
    out.back() = hi;
    return out;
}

} // namespace rsense::numerics
