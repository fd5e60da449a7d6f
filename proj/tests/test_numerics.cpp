#include <doctest.h>

#include <cmath>
#include <cstring>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "rsense/dephasing.hpp"
#include "rsense/dispersion.hpp"
#include "rsense/errors.hpp"
#include "rsense/numerics.hpp"
#include "support.hpp"

using namespace rsense;
using namespace rsense::numerics;
using std::numbers::pi;

TEST_SUITE("numerics") {

TEST_CASE("erfcx against high-precision values") {
    CHECK(erfcx(0.0) == doctest::Approx(1.0).epsilon(1e-15));
    struct Ref {
        double x, value;
    };
    const Ref refs[] = {
        {0.5, 0.61569034419292587487},   {5.0, 0.11070463773306862637},
        {11.999, 0.046858099197526279603}, {12.001, 0.046850343471997566238},
        {30.0, 0.018795888861416751497}, {1000.0, 0.0005641893014533876542},
    };
    for (const auto& r : refs) {
        CAPTURE(r.x);
        CHECK(testing::rel_err(erfcx(r.x), r.value) < 1e-13);
    }
    CHECK(std::isfinite(erfcx(1e8)));
}

TEST_CASE("gaussian cutoff") {
    const double cut = gaussian_cutoff(1.0);
    CHECK(std::exp(-cut * cut / 2) == doctest::Approx(1e-16).epsilon(1e-9));
    CHECK(gaussian_cutoff(0.5) == doctest::Approx(0.5 * cut));
    CHECK_THROWS_AS(gaussian_cutoff(0.0), InvalidParameter);
}

TEST_CASE("quad spec validation") {
    QuadSpec spec;
    CHECK_NOTHROW(spec.validate());
    spec.max_panels = 63;
    CHECK_THROWS_AS(spec.validate(), InvalidParameter);
    spec = {};
    spec.rel_tol = 0.0;
    CHECK_THROWS_AS(spec.validate(), InvalidParameter);
    spec = {};
    spec.abs_tol = -1.0;
    CHECK_THROWS_AS(spec.validate(), InvalidParameter);
}

TEST_CASE("kronrod rule integrates polynomials exactly") {
    for (int deg = 0; deg <= 22; ++deg) {
        double k = 0.0;
        double g = 0.0;
        for (int i = 0; i < KronrodRule::size; ++i) {
            k += KronrodRule::kronrod_weights[i] * std::pow(KronrodRule::nodes[i], deg);
            g += KronrodRule::gauss_weights[i] * std::pow(KronrodRule::nodes[i], deg);
        }
        const double exact = (deg % 2) ? 0.0 : 2.0 / (deg + 1);
        CAPTURE(deg);
        CHECK(k == doctest::Approx(exact).epsilon(1e-14));
        if (deg <= 13) {
            CHECK(g == doctest::Approx(exact).epsilon(1e-14));
        }
    }
}

TEST_CASE("semi-infinite Gaussian moments") {
    const auto r1 = integrate_semiinfinite([](double k) { return k * k * k * std::exp(-k * k / 2); }, 1.0);
    CHECK(r1.value == doctest::Approx(2.0).epsilon(1e-12));
    const auto r2 = integrate_semiinfinite([](double k) { return std::exp(-k * k); }, std::sqrt(0.5));
    CHECK(r2.value == doctest::Approx(std::sqrt(pi) / 2).epsilon(1e-12));
    CHECK(r1.error <= 1e-8 * std::abs(r1.value) + 1e-12);
}

TEST_CASE("oscillatory closed form and t = 0 reduction") {
    const auto f = [](double k) { return std::exp(-k); };
    const auto rate = [](double) { return 1.0; };
    const double t = 10.0;
    const auto r = integrate_oscillatory([&](double k) { return f(k) * std::cos(k * t); }, rate, t, 5.0);
    CHECK(r.value == doctest::Approx(1.0 / 101.0).epsilon(1e-10));

    const auto g = [](double k) { return k * k * k * std::exp(-k * k / 2); };
    const auto osc0 = integrate_oscillatory(g, rate, 0.0, 1.0);
    const auto semi = integrate_semiinfinite(g, 1.0);
    CHECK(std::abs(osc0.value - semi.value) <= 1e-12);
}

TEST_CASE("oscillation partition respects the panel law") {
    const auto rate = [](double k) { return 0.1 + k * k; };
    const double t = 50.0;
    const auto br = oscillation_partition(rate, 0.0, 4.0, t, 16, 1u << 20);
    REQUIRE(br.size() >= 17);
    CHECK(br.front() == 0.0);
    CHECK(br.back() == 4.0);
    for (std::size_t i = 1; i < br.size(); ++i) {
        REQUIRE(br[i] > br[i - 1]);
        const double hi_rate = rate(br[i]);  // rate is increasing
        CHECK((br[i] - br[i - 1]) * t * hi_rate <= pi / 4 * (1 + 1e-12));
    }
}

TEST_CASE("error estimates are honest on a closed-form battery") {
    struct Case {
        std::string name;
        std::function<QuadResult()> run;
        double exact;
    };
    const double e = std::numbers::e;
    std::vector<Case> cases = {
        {"x^5", [] { return integrate([](double x) { return std::pow(x, 5); }, 0, 1); }, 1.0 / 6},
        {"sin", [] { return integrate([](double x) { return std::sin(x); }, 0, pi); }, 2.0},
        {"exp", [] { return integrate([](double x) { return std::exp(x); }, 0, 1); }, e - 1},
        {"lorentz", [] { return integrate([](double x) { return 1 / (1 + x * x); }, 0, 1); }, pi / 4},
        {"sqrt", [] { return integrate([](double x) { return std::sqrt(x); }, 0, 1); }, 2.0 / 3},
        {"log", [] { return integrate([](double x) { return std::log(x); }, 0, 1); }, -1.0},
        {"cos^2", [] { return integrate([](double x) { return std::cos(x) * std::cos(x); }, 0, 2 * pi); }, pi},
        {"x^-1/2", [] { return integrate([](double x) { return 1 / std::sqrt(x); }, 0, 1); }, 2.0},
        {"|x|", [] { return integrate([](double x) { return std::abs(x); }, -1, 1.5); }, 1.625},
        {"exp decay", [] { return integrate([](double x) { return std::exp(-x); }, 0, 10); }, 1 - std::exp(-10.0)},
        {"near pole", [] { return integrate([](double x) { return 1 / (x + 0.01); }, 0, 1); }, std::log(101.0)},
        {"x sin x", [] { return integrate([](double x) { return x * std::sin(x); }, 0, pi); }, pi},
        {"cos 50x", [] { return integrate([](double x) { return std::cos(50 * x); }, 0, 1); }, std::sin(50.0) / 50},
        {"x^0.3", [] { return integrate([](double x) { return std::pow(x, 0.3); }, 0, 1); }, 1 / 1.3},
        {"1/x", [] { return integrate([](double x) { return 1 / x; }, 1, 2); }, std::log(2.0)},
        {"circle", [] { return integrate([](double x) { return std::sqrt(1 - x * x); }, 0, 1); }, pi / 4},
        {"k^3 gauss",
         [] { return integrate_semiinfinite([](double k) { return k * k * k * std::exp(-k * k / 2); }, 1.0); },
         2.0},
        {"gauss", [] { return integrate_semiinfinite([](double k) { return std::exp(-k * k); }, std::sqrt(0.5)); },
         std::sqrt(pi) / 2},
        {"k^2 gauss",
         [] { return integrate_semiinfinite([](double k) { return k * k * std::exp(-k * k / 2); }, 1.0); },
         std::sqrt(pi / 2)},
        {"gauss cos 3k",
         [] {
             return integrate_oscillatory([](double k) { return std::exp(-k * k / 2) * std::cos(3 * k); },
                                          [](double) { return 1.0; }, 3.0, 1.0);
         },
         std::sqrt(pi / 2) * std::exp(-4.5)},
    };
    REQUIRE(cases.size() == 20);
    for (const auto& c : cases) {
        const auto r = c.run();
        const double true_err = std::abs(r.value - c.exact);
        CAPTURE(c.name);
        CAPTURE(true_err);
        CAPTURE(r.error);
        CHECK(true_err <= 3.0 * r.error);
    }
}

TEST_CASE("quadrature failure carries the worst panel") {
    QuadSpec spec;
    spec.max_panels = 64;
    spec.rel_tol = 1e-14;
    spec.abs_tol = 1e-300;
    try {
        integrate([](double x) { return std::sin(1e5 * x * x); }, 0.0, 10.0, spec);
        FAIL("expected QuadratureFailure");
    } catch (const QuadratureFailure& e) {
        CHECK(e.worst_panel_lo() < e.worst_panel_hi());
        CHECK(e.worst_panel_lo() >= 0.0);
        CHECK(e.worst_panel_hi() <= 10.0);
        CHECK(e.worst_panel_error() > 0.0);
    }
}

TEST_CASE("adaptive quadrature is bit-reproducible") {
    const auto p = testing::reference_point(4.8);
    const double a = dephasing::gamma(37.3, p);
    const double b = dephasing::gamma(37.3, p);
    CHECK(std::memcmp(&a, &b, sizeof a) == 0);
}

TEST_CASE("large t stays within the panel budget") {
    QuadSpec spec;
    spec.max_panels = 2'000'000;
    const double g = dephasing::gamma(1000.0, testing::reference_point(4.8), spec);
    CHECK(g >= 0.0);
    CHECK(g <= 2.0 * dephasing::gamma0(testing::reference_point(4.8)));
}

TEST_CASE("root finding") {
    CHECK(find_root_bracketed([](double x) { return x * x - 2; }, 1, 2, 1e-12) ==
          doctest::Approx(std::sqrt(2.0)).epsilon(1e-10));
    CHECK(std::abs(find_root_bracketed([](double x) { return x; }, -1, 1, 1e-12)) < 1e-12);
    CHECK_THROWS_AS(find_root_bracketed([](double x) { return x * x + 1; }, -1, 1, 1e-12), BracketError);

    double lo = 1.0;
    double hi = 2.0;
    find_root_bracketed(
        [&](double x) {
            lo = std::min(lo, x);
            hi = std::max(hi, x);
            return std::exp(x) - 5;
        },
        1, 2, 1e-14);
    CHECK(lo >= 1.0);
    CHECK(hi <= 2.0);
}

TEST_CASE("roton minimum from the derivative root matches a dense-grid argmin") {
    const auto p = testing::reference_point(4.8);
    const double km = find_root_bracketed([&](double k) { return dispersion::omega_dk(k, p); }, 1.3, 2.5, 1e-12);
    double best_k = 0.0;
    double best = 1e300;
    for (double k = 1.55; k <= 1.70; k += 1e-7) {
        const double w = dispersion::omega(k, p);
        if (w < best) {
            best = w;
            best_k = k;
        }
    }
    CHECK(std::abs(km - best_k) < 1e-6);
}

TEST_CASE("central differences") {
    CHECK(central_diff([](double x) { return std::sin(x); }, 0.0, 1e-4) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(std::abs(central_diff([](double x) { return x * x; }, 3.0, 1e-4) - 6.0) < 1e-9);
    const auto p = testing::reference_point(4.8);
    QuadSpec tight;
    tight.rel_tol = 1e-12;
    const double fd = central_diff([&](double c) { return dephasing::gamma0(p.with_chi(c), tight); }, 4.8, 1e-3);
    CHECK(testing::rel_err(fd, dephasing::gamma0_dchi(p)) < 1e-4);
}

TEST_CASE("minimize and logspace") {
    CHECK(minimize_bracketed([](double x) { return (x - 0.3) * (x - 0.3); }, -1, 2, 1e-10) ==
          doctest::Approx(0.3).epsilon(1e-8));
    const auto g = logspace(1e-3, 20.0, 5);
    REQUIRE(g.size() == 5);
    CHECK(g.front() == 1e-3);
    CHECK(g.back() == 20.0);
    CHECK(g[2] == doctest::Approx(std::sqrt(1e-3 * 20.0)));
}

}
