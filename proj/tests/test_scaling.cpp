#include "decoh/scaling_fit.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>

using namespace decoh;
using namespace decoh::classical;
using Catch::Approx;

namespace {

std::pair<std::vector<double>, std::vector<double>> series(double (*f)(double), double t0, double t1, int n) {
    std::vector<double> t, y;
    for (int i = 0; i <= n; ++i) {
        t.push_back(t0 + (t1 - t0) * i / n);
        y.push_back(f(t.back()));
    }
    return {t, y};
}

}  // namespace

TEST_CASE("pure power law") {
    auto [t, y] = series([](double x) { return 2.5 * x * x * x; }, 1.0, 50.0, 200);
    const auto c = classify_scaling(t, y, {1.0, 50.0});
    CHECK(c.best.kind == ScalingKind::PowerLaw);
    CHECK(c.power_law.exponent_or_rate == Approx(3.0).epsilon(1e-12));
    CHECK(c.power_law.log_prefactor == Approx(std::log(2.5)).epsilon(1e-12));
    CHECK(c.power_law.r_squared == Approx(1.0));
    CHECK_FALSE(c.ambiguous);
}

TEST_CASE("pure exponential") {
    auto [t, y] = series([](double x) { return 1e-9 * std::exp(0.3 * x); }, 5.0, 80.0, 300);
    const auto c = classify_scaling(t, y, {5.0, 80.0});
    CHECK(c.best.kind == ScalingKind::Exponential);
    CHECK(c.exponential.exponent_or_rate == Approx(0.3).epsilon(1e-12));
}

TEST_CASE("window bounds select samples") {
    auto [t, y] = series([](double x) { return x * x; }, 0.0, 10.0, 100);
    const auto c = classify_scaling(t, y, {2.0, 8.0});
    CHECK(c.best.samples == 61);
    CHECK(c.power_law.exponent_or_rate == Approx(2.0));
}

TEST_CASE("degenerate windows raise FitError") {
    auto [t, y] = series([](double x) { return x; }, 1.0, 10.0, 100);
    CHECK_THROWS_AS(classify_scaling(t, y, {5.0, 5.0}), FitError);
    CHECK_THROWS_AS(classify_scaling(t, y, {1.0, 1.1}), FitError);
    std::vector<double> flat(t.size(), 3.0);
    CHECK_THROWS_AS(classify_scaling(t, flat, {1.0, 10.0}), FitError);
    std::vector<double> shorter(t.begin(), t.end() - 1);
    CHECK_THROWS_AS(classify_scaling(shorter, y, {1.0, 10.0}), FitError);
}

TEST_CASE("near-ties are flagged") {
    // over a narrow window both laws fit almost equally well
    auto [t, y] = series([](double x) { return x * x * x; }, 100.0, 101.0, 50);
    CHECK(classify_scaling(t, y, {100.0, 101.0}).ambiguous);
}

TEST_CASE("regular window starts after the transient") {
    DivergenceSeries s;
    for (int i = 0; i <= 100; ++i) s.t.push_back(i);
    const auto w = regular_fit_window(s, 3.0);
    CHECK(w.t_lo == 15.0);
    CHECK(w.t_hi == 100.0);
}

TEST_CASE("chaotic window brackets the growth phase") {
    DivergenceSeries s;
    const double d0 = 1e-8;
    for (int i = 0; i <= 100; ++i) {
        s.t.push_back(i);
        s.separation.push_back(d0 * std::exp(0.3 * i));
        s.D.push_back(1.0);
        s.delta.push_back({d0, 0, 0, 0});
    }
    const auto w = chaotic_fit_window(s, 10.0);
    CHECK(w.t_lo == Approx(std::ceil(std::log(10.0) / 0.3)));
    // 0.1 * 10 = 1 is reached once d0 e^{0.3 t} > 1
    CHECK(w.t_hi == Approx(std::ceil(std::log(1.0 / d0) / 0.3) - 1));
}

TEST_CASE("ensemble rate recovers a synthetic exponent") {
    EnsembleDivergence e;
    e.delta_norm = 1e-10;
    for (int i = 0; i <= 400; ++i) {
        const double t = 0.25 * i;
        e.t.push_back(t);
        e.mean_log_D.push_back(-40.0 + 0.2 * t);
        e.mean_log_separation.push_back(std::log(1e-10) + 0.1 * t);
        e.max_separation.push_back(1e-10 * std::exp(0.3 * t));
    }
    const auto w = ensemble_fit_window(e, 1.0);
    CHECK(w.t_lo > 0.0);
    CHECK(w.t_hi < 100.0);
    CHECK(ensemble_rate(e, w).exponent_or_rate == Approx(0.2));
}
