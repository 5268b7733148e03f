#include "decoh/bath.hpp"
#include "decoh/classical_dynamics.hpp"
#include "oracles.hpp"

#include <catch_amalgamated.hpp>

#include <numbers>

using namespace decoh;
using namespace decoh::bath;
using Catch::Approx;

namespace {

DriveDifference constant_drive(double d, double h, int n) {
    DriveDifference dd;
    for (int i = 0; i <= n; ++i) {
        dd.t.push_back(h * i);
        dd.df_x.push_back(d);
        dd.df_y.push_back(0.0);
    }
    return dd;
}

}  // namespace

TEST_CASE("spectral weight") {
    const SpectralDensity sd{2.0, 5.0};
    CHECK(spectral_weight(sd, 1.0) == Approx(1.0 / std::numbers::pi).epsilon(1e-15));
    CHECK(spectral_weight(sd, 5.0) == Approx(5.0 / std::numbers::pi).epsilon(1e-15));
    CHECK(spectral_weight(sd, 5.0001) == 0.0);
    CHECK(spectral_weight(sd, 0.0) == 0.0);
    CHECK(spectral_weight(sd, -1.0) == 0.0);
    CHECK_THROWS_AS((SpectralDensity{0.0, 1.0}.validate()), DomainError);
    CHECK_THROWS_AS((SpectralDensity{1.0, -1.0}.validate()), DomainError);
}

TEST_CASE("mode discretization") {
    const SpectralDensity sd{1.0, 10.0};
    const auto two = discretize_bath(sd, 2);
    REQUIRE(two.modes.size() == 2);
    CHECK(two.modes[0].omega == Approx(2.5));
    CHECK(two.modes[1].omega == Approx(7.5));
    CHECK(two.modes[0].weight == Approx(2.5 / (2 * std::numbers::pi) * 5.0));

    const auto many = discretize_bath(sd, 10000);
    const double expected = sd.C * sd.omega_max * sd.omega_max / (4 * std::numbers::pi);
    CHECK(std::abs(many.total_weight() / expected - 1.0) <= 1e-4);
    CHECK_THROWS_AS(discretize_bath(sd, 1), DomainError);
}

TEST_CASE("driven amplitude") {
    const double w = 1.7, k = 0.3, h = 0.01;
    const int n = 1000;
    std::vector<double> t(n + 1), zero(n + 1, 0.0), cst(n + 1, 0.8), lin(n + 1), sum(n + 1);
    for (int i = 0; i <= n; ++i) {
        t[i] = h * i;
        lin[i] = 0.5 - 0.2 * t[i];
        sum[i] = cst[i] + 2.0 * lin[i];
    }
    const std::complex<double> I{0, 1}, a0{0.4, -0.1};

    SECTION("free rotation") {
        const auto a = evolve_bath_amplitude(w, k, t, zero, a0);
        for (int i = 0; i <= n; i += 50) CHECK(std::abs(a[i] - std::exp(-I * w * t[i]) * a0) <= 1e-12);
    }
    SECTION("constant drive closed form") {
        const auto a = evolve_bath_amplitude(w, k, t, cst, a0);
        for (int i = 0; i <= n; i += 50) {
            const auto e = std::exp(-I * w * t[i]);
            const auto ref = e * a0 - I * k * 0.8 * (1.0 - e) / (I * w);
            CHECK(std::abs(a[i] - ref) <= 1e-8);
        }
    }
    SECTION("linear drive against RK4") {
        const auto a = evolve_bath_amplitude(w, k, t, lin, a0);
        // α̇ = −iωα − iκ f with f = 0.5 − 0.2 τ, integrated by RK4 at a finer step
        auto rhs = [&](double s, std::complex<double> x) { return -I * w * x - I * k * (0.5 - 0.2 * s); };
        std::complex<double> x = a0;
        const double hh = h / 10;
        for (int i = 0; i < n * 10; ++i) {
            const double s = i * hh;
            const auto k1 = rhs(s, x), k2 = rhs(s + hh / 2, x + hh / 2 * k1), k3 = rhs(s + hh / 2, x + hh / 2 * k2),
                       k4 = rhs(s + hh, x + hh * k3);
            x += hh / 6 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        CHECK(std::abs(a.back() - x) <= 1e-9);
    }
    SECTION("linear in the drive") {
        const auto a1 = evolve_bath_amplitude(w, k, t, cst, 0.0);
        const auto a2 = evolve_bath_amplitude(w, k, t, lin, 0.0);
        const auto a3 = evolve_bath_amplitude(w, k, t, sum, 0.0);
        for (int i = 0; i <= n; i += 25) CHECK(std::abs(a3[i] - (a1[i] + 2.0 * a2[i])) <= 1e-12);
    }
    SECTION("length mismatch") {
        std::vector<double> short_drive(n, 0.0);
        CHECK_THROWS_AS(evolve_bath_amplitude(w, k, t, short_drive, 0.0), GridMismatchError);
    }
}

TEST_CASE("thermal occupation and displacement identity") {
    CHECK(thermal_occupation(1.0, 1.0) == Approx(1.0 / (std::exp(1.0) - 1.0)).epsilon(1e-14));
    CHECK(thermal_occupation(1e-6, 1000.0) == Approx(1e9).epsilon(1e-6));
    CHECK_THROWS_AS(thermal_occupation(1.0, 0.0), DomainError);
    for (double omega : {0.5, 1.0, 3.0}) {
        for (double T : {0.3, 1.0, 2.0}) {
            const double nbar = 1.0 / (std::exp(omega / T) - 1.0);
            if (std::pow(nbar / (1 + nbar), 200) > 1e-12) continue;
            for (double mu : {0.1, 0.5, 1.0, 1.4}) {
                const std::complex<double> m{mu * 0.6, mu * 0.8};
                const double brute = oracle::thermal_displacement_bruteforce(nbar, mu * mu, 200);
                CHECK(std::abs(thermal_displacement_factor(omega, T, m) - brute) <= 1e-6);
            }
        }
    }
}

TEST_CASE("oracle exponent") {
    const SpectralDensity sd{1.0, 10.0};
    const double T = 1000.0;

    SECTION("zero drive") {
        const auto g = decoherence_exponent_oracle(discretize_bath(sd, 100), constant_drive(0.0, 0.01, 100), T);
        for (double v : g) CHECK(v == 0.0);
    }
    SECTION("single mode, constant drive") {
        BathDiscretization b;
        b.density = sd;
        b.modes = {{2.3, 0.7}};
        const auto dd = constant_drive(0.4, 0.01, 500);
        const auto g = decoherence_exponent_oracle(b, dd, 5.0);
        for (std::size_t i = 0; i < g.size(); i += 20) {
            const double ref = oracle::single_mode_constant(0.7, 2.3, 5.0, 0.4, dd.t[i]);
            CHECK(g[i] == Approx(ref).epsilon(1e-10).margin(1e-15));
        }
    }
    SECTION("swap and common translation leave it unchanged") {
        const models::HamiltonianModel m(models::Harmonic2D{1.0, 1.3});
        const models::PhasePoint z1{0.5, 0.2, 0.0, 0.1}, z2{0.52, 0.19, 0.0, 0.1};
        const auto a = classical::propagate(m, z1, 0.01, 500);
        const auto b = classical::propagate(m, z2, 0.01, 500);
        auto shifted = [](classical::Trajectory tr) {
            for (auto& z : tr.z) {
                z.qx += 3.0;
                z.qy -= 1.0;
            }
            return tr;
        };
        const auto bath = discretize_bath(sd, 2000);
        const auto g = decoherence_exponent_oracle(bath, drive_difference(a, b, 1.0), T);
        const auto gs = decoherence_exponent_oracle(bath, drive_difference(b, a, 1.0), T);
        const auto gt = decoherence_exponent_oracle(bath, drive_difference(shifted(a), shifted(b), 1.0), T);
        for (std::size_t i = 0; i < g.size(); ++i) {
            CHECK(g[i] >= 0.0);
            CHECK(gs[i] == Approx(g[i]).epsilon(1e-12).margin(1e-300));
            CHECK(gt[i] == Approx(g[i]).epsilon(1e-9).margin(1e-300));
        }
    }
    SECTION("no recurrence and refinement") {
        const auto dd = constant_drive(0.01, 0.01, 10000);  // t up to 100
        const auto g1 = decoherence_exponent_oracle(discretize_bath(sd, 10000), dd, T);
        const auto g2 = decoherence_exponent_oracle(discretize_bath(sd, 20000), dd, T);
        for (std::size_t i = 500; i < g1.size(); i += 500) {
            const double cont = T * oracle::cutoff_limit_constant(sd.C, 0.01, dd.t[i], sd.omega_max);
            CHECK(std::abs(g1[i] / cont - 1.0) <= 1e-3);
            CHECK(std::abs(g1[i] / g2[i] - 1.0) <= 1e-3);
        }
    }
    SECTION("grid errors") {
        auto dd = constant_drive(1.0, 0.01, 10);
        dd.t[5] += 0.003;
        CHECK_THROWS_AS(decoherence_exponent_oracle(discretize_bath(sd, 10), dd, T), GridMismatchError);
        auto dd2 = constant_drive(1.0, 0.01, 10);
        dd2.df_y.pop_back();
        CHECK_THROWS_AS(dd2.uniform_step(), GridMismatchError);
    }
}

TEST_CASE("drive difference from divergence series") {
    const models::HamiltonianModel m(models::Harmonic2D{1.0, 1.0}, 2.0);
    const auto ds = classical::divergence_integral(m, {0.3, 0.0, 0.0, 0.0}, {0.0, 0.0, 0.01, 0.0}, 0.01, 200);
    const auto dd = drive_difference(ds);
    REQUIRE(dd.has_derivatives());
    for (std::size_t i = 0; i < dd.size(); i += 20) {
        // δx(t) = δp/(mω) sin t, ω = 1
        CHECK(dd.df_x[i] == Approx(0.01 / 2.0 * std::sin(dd.t[i])).margin(1e-9));
        CHECK(dd.ddf_x[i] == Approx(0.01 / 2.0 * std::cos(dd.t[i])).margin(1e-9));
    }
}
