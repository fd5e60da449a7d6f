#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "rsense/dephasing.hpp"
#include "rsense/dispersion.hpp"
#include "rsense/errors.hpp"
#include "rsense/metrology.hpp"
#include "support.hpp"

using namespace rsense;
using namespace rsense::metrology;
using std::numbers::pi;
using testing::reference_point;

namespace {

struct QfiCurve {
    std::vector<double> t;
    std::vector<double> f;
};

QfiCurve exact_qfi(const ParamSet& p, double t_max, double dt) {
    const auto steps = static_cast<std::size_t>(std::llround(t_max / dt)) + 1;
    const dephasing::ModeTable table(p, dt * static_cast<double>(steps - 1));
    QfiCurve c;
    const auto v = table.evaluate_grid(0.0, dt, steps);
    for (std::size_t i = 0; i < steps; ++i) {
        c.t.push_back(dt * static_cast<double>(i));
        c.f.push_back(qfi_from(v[i].gamma, v[i].gamma_dchi));
    }
    return c;
}

// Dominant three-point peaks (largest within half a roton period) on [lo, hi].
std::vector<Peak> dominant_peaks(const ParamSet& p, double lo, double hi) {
    const double omega_m = dispersion::roton_features(p)->roton.omega;
    const double half = pi / omega_m;
    const auto c = exact_qfi(p, hi + half, 0.05);
    std::vector<Peak> out;
    for (const auto& pk : local_maxima(c.t, c.f, half)) {
        if (pk.t >= lo && pk.t <= hi) {
            out.push_back(pk);
        }
    }
    return out;
}

} // namespace

TEST_SUITE("metrology") {

TEST_CASE("probe state") {
    const ProbeState s{0.3};
    CHECK(s.coherence() == doctest::Approx(std::exp(-0.3)));
    CHECK(s.sigma_x_mean() == s.coherence());
    CHECK(s.sigma_x_variance() == doctest::Approx(1.0 - std::exp(-0.6)));
    CHECK(ProbeState{0.0}.sigma_x_variance() == 0.0);
}

TEST_CASE("qfi limits") {
    CHECK(qfi_from(0.0, 0.0) == 0.0);
    CHECK(fisher_sigma_x_from(0.0, 0.0) == 0.0);
    CHECK(qfi_from(0.2, 0.0) == 0.0);
    CHECK(fisher_sigma_x_from(0.2, 0.0) == 0.0);
    CHECK(fisher_sigma_x_from(800.0, 1.0) == 0.0);
    CHECK(qfi_from(800.0, 1.0) == 0.0);
    CHECK(qfi(0.0, reference_point(4.8)) == 0.0);
    CHECK(fisher_sigma_x(0.0, reference_point(4.8)) == 0.0);
}

TEST_CASE("sigma_x measurement saturates the QFI") {
    testing::Sampler s(555);
    int checked = 0;
    while (checked < 20) {
        const double chi = s.uniform(0.0, 5.6);
        const double t = s.uniform(0.01, 200.0);
        const ParamSet p = reference_point(chi);
        const double g = dephasing::gamma(t, p);
        if (!(g > 1e-6)) {
            continue;
        }
        const double d = dephasing::gamma_dchi(t, p);
        CAPTURE(chi);
        CAPTURE(t);
        CHECK(testing::rel_err(fisher_sigma_x_from(g, d), qfi_from(g, d)) < 1e-12);
        CHECK(qfi_from(g, d) >= 0.0);
        ++checked;
    }
    const double t = 13.0;
    CHECK(testing::rel_err(fisher_sigma_x(t, reference_point(5.0)), qfi(t, reference_point(5.0))) < 1e-12);
}

TEST_CASE("envelope coefficients") {
    SUBCASE("chi = 4.8") {
        const auto c = envelope_coefficients(reference_point(4.8));
        CHECK(c.A == doctest::Approx(1.6e-3).epsilon(0.05));
        CHECK(c.B == doctest::Approx(4.6e-3).epsilon(0.05));
        CHECK(c.C == doctest::Approx(3.4e-3).epsilon(0.05));
    }
    SUBCASE("chi = 5.6") {
        const auto c = envelope_coefficients(reference_point(5.6));
        CHECK(std::abs(c.omega_m - 0.2515) < 5e-4);
        CHECK(c.A == doctest::Approx(0.8316).epsilon(0.02));
        CHECK(c.B == doctest::Approx(5.2028).epsilon(0.02));
        CHECK(c.C == doctest::Approx(8.1374).epsilon(0.02));
    }
    SUBCASE("identities across the roton window") {
        for (double chi = 4.3; chi <= 5.6 + 1e-9; chi += 0.1) {
            CAPTURE(chi);
            const auto c = envelope_coefficients(reference_point(chi));
            const double e = std::expm1(2.0 * c.gamma0);
            CHECK(c.A > 0.0);
            CHECK(c.B > 0.0);
            CHECK(c.C > 0.0);
            CHECK(c.a_m < 0.0);
            CHECK(testing::rel_err(c.B * c.B, 4.0 * c.A * c.C) < 1e-10);
            CHECK(testing::rel_err(c.A, pi * c.a_m * c.a_m / e) < 1e-13);
            CHECK(testing::rel_err(c.C, c.gamma0_dchi * c.gamma0_dchi / e) < 1e-13);
        }
    }
    CHECK_THROWS_AS(envelope_coefficients(reference_point(1.0)), RegimeError);
}

TEST_CASE("roton weight dominates the maxon weight") {
    for (double chi = 4.4; chi <= 5.6 + 1e-9; chi += 0.05) {
        CAPTURE(chi);
        const auto c = envelope_coefficients(reference_point(chi));
        CHECK(std::abs(c.a_m) / std::abs(c.a_M) > 10.0);
    }
}

TEST_CASE("A, B, C grow by three orders of magnitude from chi = 4.3 to 5.6") {
    const auto lo = envelope_coefficients(reference_point(4.3));
    const auto hi = envelope_coefficients(reference_point(5.6));
    const double rA = hi.A / lo.A;
    const double rB = hi.B / lo.B;
    const double rC = hi.C / lo.C;
    CAPTURE(rA);
    CAPTURE(rB);
    CAPTURE(rC);
    CHECK(rA >= 1e2);
    CHECK(rA <= 1e4);
    CHECK(rB >= 1e2);
    CHECK(rB <= 1e4);
    CHECK(rC >= 1e2);
    CHECK(rC <= 1e4);
}

TEST_CASE("approximate qfi closed forms") {
    const auto c = envelope_coefficients(reference_point(5.6));
    const double t0 = (2.0 * pi - pi / 4) / c.omega_m;  // phase = 2 pi
    CHECK(qfi_tilde(t0, c) == doctest::Approx(c.C).epsilon(1e-10));
    const double t1 = (3.0 * pi / 2 - pi / 4 + 2.0 * pi) / c.omega_m;  // sin = -1
    CHECK(qfi_tilde(t1, c) == doctest::Approx(qfi_envelope(t1, c)).epsilon(1e-12));
    CHECK(qfi_envelope(t1, c) == doctest::Approx(c.A * t1 + c.B * std::sqrt(t1) + c.C).epsilon(1e-15));
}

TEST_CASE("approximate qfi tracks the exact curve at chi = 5.6") {
    const ParamSet p = reference_point(5.6);
    const auto c = envelope_coefficients(p);
    const auto curve = exact_qfi(p, 150.0, 0.05);
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < curve.t.size(); ++i) {
        if (curve.t[i] < 20.0) {
            continue;
        }
        const double d = qfi_tilde(curve.t[i], c) - curve.f[i];
        num += d * d;
        den += curve.f[i] * curve.f[i];
    }
    CHECK(std::sqrt(num / den) < 0.10);
}

TEST_CASE("local optimal times") {
    EnvelopeCoefficients c;
    c.omega_m = 0.2515;
    c.A = 0.8316;
    c.B = 5.2028;
    c.C = 8.1374;
    const auto lo = local_optimal_times(c, 8);
    REQUIRE(lo.size() == 8);
    CHECK(lo[0].n == 1);
    CHECK(lo[0].t == doctest::Approx(40.60).epsilon(1e-3));
    for (std::size_t i = 1; i < lo.size(); ++i) {
        CHECK(lo[i].t - lo[i - 1].t == doctest::Approx(2 * pi / c.omega_m).epsilon(1e-12));
        CHECK(lo[i].value > lo[i - 1].value);
        CHECK(lo[i].value == doctest::Approx(qfi_envelope(lo[i].t, c)));
    }
    CHECK_THROWS_AS(local_optimal_times(c, 0), InvalidParameter);
}

TEST_CASE("optimal times sit near true maxima of the exact qfi at chi = 5.6") {
    const ParamSet p = reference_point(5.6);
    const auto c = envelope_coefficients(p);
    const auto peaks = dominant_peaks(p, 0.0, 200.0);
    const double half_period = pi / c.omega_m;
    for (const auto& lo : local_optimal_times(c, 4)) {
        CAPTURE(lo.t);
        double nearest = 1e300;
        for (const auto& pk : peaks) {
            nearest = std::min(nearest, std::abs(pk.t - lo.t));
        }
        CHECK(nearest < half_period);
    }
}

TEST_CASE("local qfi maxima grow at chi = 5.6") {
    const auto peaks = dominant_peaks(reference_point(5.6), 10.0, 200.0);
    REQUIRE(peaks.size() >= 5);
    for (std::size_t i = 1; i < peaks.size(); ++i) {
        CAPTURE(peaks[i].t);
        CHECK(peaks[i].value > peaks[i - 1].value);
    }
}

TEST_CASE("local qfi maxima grow at chi = 4.8") {
    const auto peaks = dominant_peaks(reference_point(4.8), 10.0, 200.0);
    REQUIRE(peaks.size() >= 5);
    for (std::size_t i = 1; i < peaks.size(); ++i) {
        CAPTURE(peaks[i].t);
        CHECK(peaks[i].value > peaks[i - 1].value);
    }
}

TEST_CASE("qfi plateau below the roton onset") {
    const auto c = exact_qfi(reference_point(1.0), 200.0, 0.05);
    std::size_t arg = 0;
    for (std::size_t i = 0; i < c.f.size(); ++i) {
        if (c.f[i] > c.f[arg]) {
            arg = i;
        }
    }
    CHECK(c.t[arg] > 0.0);
    CHECK(c.t[arg] < 20.0);
    double lo = 1e300;
    double hi = -1e300;
    for (std::size_t i = 0; i < c.f.size(); ++i) {
        if (c.t[i] >= 100.0) {
            lo = std::min(lo, c.f[i]);
            hi = std::max(hi, c.f[i]);
        }
    }
    CHECK(hi - lo < 0.01 * c.f[arg]);
}

TEST_CASE("local maxima helper") {
    const std::vector<double> t = {0, 1, 2, 3, 4, 5, 6, 7, 8};
    const std::vector<double> y = {0, 2, 1, 3, 1, 1, 4, 0, 0};
    const auto all = local_maxima(t, y, 0.0);
    REQUIRE(all.size() == 3);
    CHECK(all[0].t == 1.0);
    CHECK(all[2].value == 4.0);
    const auto dom = local_maxima(t, y, 2.0);
    REQUIRE(dom.size() == 2);
    CHECK(dom[0].t == 3.0);
    CHECK(dom[1].t == 6.0);
}

TEST_CASE("non-Markovianity of synthetic curves") {
    std::vector<double> mono;
    for (int i = 0; i < 1000; ++i) {
        mono.push_back(0.01 * i + std::sin(0.001 * i));
    }
    CHECK(non_markovianity_from_samples(mono) == 0.0);
    CHECK(non_markovianity_from_samples(std::vector<double>{}) == 0.0);

    // a (1 - cos t) on [0, 4 pi]: two revivals from 2a back to 0.
    const double a = 0.3;
    const double dt = 0.01;
    std::vector<double> osc;
    for (double t = 0.0; t <= 4 * pi + 0.5; t += dt) {
        osc.push_back(a * (1.0 - std::cos(t)));
    }
    CHECK(non_markovianity_from_samples(osc) == doctest::Approx(2.0 * (1.0 - std::exp(-2.0 * a))).epsilon(1e-7));
    const auto profile = non_markovianity_profile(osc);
    REQUIRE(profile.size() == osc.size());
    for (std::size_t i = 1; i < profile.size(); ++i) {
        REQUIRE(profile[i] >= profile[i - 1]);
    }
}

TEST_CASE("non-Markovianity on the model") {
    SUBCASE("converges below the roton onset") {
        const auto n = non_markovianity(reference_point(1.0), std::vector<double>{100.0, 200.0}, 0.25);
        CHECK(n[0] > 0.0);
        CHECK(n[1] - n[0] < 1e-3 * n[0]);
    }
    SUBCASE("keeps growing in the roton regime") {
        const auto n = non_markovianity(reference_point(4.8), std::vector<double>{100.0, 200.0}, 0.25);
        CHECK(n[1] > 1.1 * n[0]);
    }
    SUBCASE("coarse sampling is rejected") {
        CHECK_THROWS_AS(non_markovianity(reference_point(4.8), 100.0, 1.0), ResolutionError);
        CHECK_NOTHROW(non_markovianity(reference_point(1.0), 10.0, 1.0));
    }
}

}
