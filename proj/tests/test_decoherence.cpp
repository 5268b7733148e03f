#include "decoh/decoherence.hpp"
#include "oracles.hpp"

#include <catch_amalgamated.hpp>

#include <numbers>

using namespace decoh;
using namespace decoh::decoherence;
using Catch::Approx;

namespace {

DriveDifference harmonic_drive(double d, double h, int n, bool derivs) {
    DriveDifference dd;
    for (int i = 0; i <= n; ++i) {
        const double t = h * i;
        dd.t.push_back(t);
        dd.df_x.push_back(d * std::cos(t));
        dd.df_y.push_back(0.0);
        if (derivs) {
            dd.ddf_x.push_back(-d * std::sin(t));
            dd.ddf_y.push_back(0.0);
        }
    }
    return dd;
}

quantum::ExpectationSeries variance_series(double h, int n, const std::function<double(double)>& vx,
                                           const std::function<double(double)>& vy) {
    quantum::ExpectationSeries s;
    for (int i = 0; i <= n; ++i) {
        const double t = h * i;
        s.t.push_back(t);
        s.mean_qx.push_back(0.0);
        s.mean_qy.push_back(0.0);
        s.var_qx.push_back(vx(t));
        s.var_qy.push_back(vy(t));
    }
    return s;
}

DecoherenceSeries series(const std::vector<double>& t, const std::function<double(double)>& f) {
    DecoherenceSeries s;
    s.t = t;
    for (double x : t) s.gamma.push_back(f(x));
    return s;
}

}  // namespace

TEST_CASE("asymptotic exponent") {
    const double C = 0.7, T = 300.0;
    SECTION("zero drive") {
        auto dd = harmonic_drive(0.0, 0.01, 100, true);
        for (double g : asymptotic_exponent(dd, C, T).gamma) CHECK(g == 0.0);
    }
    SECTION("constant drive") {
        DriveDifference dd;
        for (int i = 0; i <= 100; ++i) {
            dd.t.push_back(0.05 * i);
            dd.df_x.push_back(0.3);
            dd.df_y.push_back(-0.4);
        }
        const auto g = asymptotic_exponent(dd, C, T);
        for (std::size_t i = 0; i < g.t.size(); ++i) {
            CHECK(g.gamma[i] == Approx(C * T / 2 * 0.25 * g.t[i]).epsilon(1e-13).margin(1e-13));
        }
    }
    SECTION("harmonic drive, closed form") {
        const double d = 0.02;
        for (bool derivs : {true, false}) {
            const auto dd = harmonic_drive(d, 0.01, 2000, derivs);
            const auto g = asymptotic_exponent(dd, C, T);
            const double tol = derivs ? 1e-8 : 1e-4;
            for (std::size_t i = 100; i < g.t.size(); i += 100) {
                const double t = g.t[i];
                const double ref = C * T / 2 * d * d * (t / 2 + std::sin(2 * t) / 4);
                CHECK(std::abs(g.gamma[i] / ref - 1.0) <= tol);
            }
        }
    }
    SECTION("non-uniform grid is rejected") {
        auto dd = harmonic_drive(1.0, 0.01, 10, false);
        dd.t[3] = 0.0305;
        CHECK_THROWS_AS(asymptotic_exponent(dd, C, T), GridMismatchError);
    }
}

TEST_CASE("weight function") {
    CHECK(weight_w(0.5, 2 * std::numbers::pi) == Approx(8.0).epsilon(1e-14));
    for (double Om : {0.5, 10.0, 300.0}) {
        for (double u : {0.0, 0.1, 0.37, 0.5, 0.9}) CHECK(weight_w(u, Om) == Approx(weight_w(1.0 - u, Om)).epsilon(1e-12));
        CHECK(std::abs(weight_w(0.0, Om) - weight_w(1e-14, Om)) <= 1e-8);
        CHECK(std::abs(weight_w(1.0, Om) - weight_w(1.0 - 1e-14, Om)) <= 1e-8);
        // across the small-argument branch of the kernel
        const double u0 = 1e-4 / Om;
        CHECK(std::abs(weight_w(u0 * (1 - 1e-9), Om) - weight_w(u0 * (1 + 1e-9), Om)) <= 1e-8);
        CHECK(weight_w(0.3, Om) >= 0.0);
    }
    CHECK_THROWS_AS(weight_w(-0.1, 1.0), DomainError);
    CHECK_THROWS_AS(weight_w(1.1, 1.0), DomainError);
}

TEST_CASE("Hartree error estimate") {
    const double C = 1.3;
    SECTION("constant variance against the cosine-integral closed form") {
        for (double wmax : {20.0, 100.0}) {
            const auto s = variance_series(1e-5, 100000, [](double) { return 0.3; }, [](double) { return 0.2; });
            const auto e = hartree_error(s, C, wmax, 1.0);
            const double ref = C / (2 * std::numbers::pi) * 0.5 * oracle::w_integral_closed(wmax);
            CHECK(std::abs(e.value - ref) <= 1e-6);
            CHECK_FALSE(e.warning);
        }
    }
    SECTION("linear in the variance") {
        const auto a = variance_series(1e-3, 2000, [](double t) { return 0.1 + t; }, [](double) { return 0.2; });
        const auto b = variance_series(1e-3, 2000, [](double t) { return 0.3 + 2 * t; }, [](double) { return 0.6; });
        const auto c = variance_series(1e-3, 2000, [](double) { return 0.1; }, [](double) { return 0.2; });
        const double lhs = hartree_error(b, C, 50, 1.5).value;
        const double rhs = 2.0 * hartree_error(a, C, 50, 1.5).value + hartree_error(c, C, 50, 1.5).value;
        CHECK(lhs == Approx(rhs).epsilon(1e-12));
    }
    SECTION("a spreading packet costs more than a coherent one") {
        const double hbar = 0.1, s0 = std::sqrt(hbar / 2);
        const auto coherent = variance_series(1e-3, 5000, [&](double) { return s0 * s0; }, [&](double) { return s0 * s0; });
        const auto freev = variance_series(1e-3, 5000, [&](double t) { return oracle::free_variance(s0, hbar, 1.0, t); },
                                           [&](double t) { return oracle::free_variance(s0, hbar, 1.0, t); });
        CHECK(hartree_error(freev, C, 50, 5.0).value > hartree_error(coherent, C, 50, 5.0).value);
    }
    SECTION("evaluation between samples and the low-cutoff flag") {
        const auto s = variance_series(0.1, 20, [](double) { return 1.0; }, [](double) { return 0.0; });
        const auto e = hartree_error(s, C, 2.0, 1.05);
        REQUIRE(e.warning);
        CHECK(e.value > 0.0);
        CHECK_THROWS_AS(hartree_error(s, C, 2.0, 3.0), DomainError);
        CHECK_THROWS_AS(hartree_error(s, -1.0, 2.0, 1.0), DomainError);
    }
}

TEST_CASE("regime comparison") {
    std::vector<double> t;
    for (int i = 0; i <= 10000; ++i) t.push_back(1e-3 * i);

    SECTION("self comparison") {
        const auto a = series(t, [](double x) { return x * x * x; });
        const auto r = compare_regimes(a, a);
        for (double q : r.ratio) CHECK(q == 1.0);
        CHECK_FALSE(r.chaotic_dominates);
        CHECK_FALSE(r.t_star);
    }
    SECTION("power law overtaken by an exponential") {
        const auto reg = series(t, [](double x) { return x * x * x; });
        const auto cha = series(t, [](double x) { return std::expm1(0.8 * x); });
        const auto r = compare_regimes(reg, cha);
        const double root = oracle::bisect([](double x) { return std::expm1(0.8 * x) - x * x * x; }, 5.0, 10.0);
        REQUIRE(r.t_star);
        CHECK(*r.t_star == Approx(root).margin(1e-5));
        CHECK(r.chaotic_dominates);
        REQUIRE(r.fit_regular);
        CHECK(r.fit_regular->power_law.exponent_or_rate == Approx(3.0).margin(1e-3));
        // a break before the crossing hides it
        const auto early = compare_regimes(reg, cha, 4.0, {});
        CHECK(early.window_end == Approx(4.0));
        CHECK_FALSE(early.chaotic_dominates);
    }
    SECTION("grid mismatch") {
        auto a = series(t, [](double x) { return x; });
        auto b = a;
        b.t[7] += 1e-4;
        CHECK_THROWS_AS(compare_regimes(a, b), GridMismatchError);
        b = a;
        b.t.pop_back();
        b.gamma.pop_back();
        CHECK_THROWS_AS(compare_regimes(a, b), GridMismatchError);
    }
}
