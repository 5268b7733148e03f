#include "decoh/decoherence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace decoh::decoherence {

std::string_view to_string(GammaSource s) {
    return s == GammaSource::Asymptotic ? "asymptotic" : "oracle";
}

DecoherenceSeries asymptotic_exponent(const DriveDifference& dd, double C, double T) {
    if (!(C > 0.0) || !std::isfinite(C)) throw DomainError("coupling C must be > 0");
    if (!(T > 0.0) || !std::isfinite(T)) throw DomainError("temperature must be > 0");
    const double h = dd.uniform_step();
    const bool corrected = dd.has_derivatives();
    const std::size_t n = dd.size();

    auto g = [&](std::size_t i) { return dd.df_x[i] * dd.df_x[i] + dd.df_y[i] * dd.df_y[i]; };
    auto dg = [&](std::size_t i) { return 2.0 * (dd.df_x[i] * dd.ddf_x[i] + dd.df_y[i] * dd.ddf_y[i]); };

    DecoherenceSeries out;
    out.t = dd.t;
    out.gamma.assign(n, 0.0);
    const double pref = 0.5 * C * T;
    double acc = 0.0;
    for (std::size_t i = 1; i < n; ++i) {
        double inc = 0.5 * h * (g(i - 1) + g(i));
        if (corrected) inc += h * h / 12.0 * (dg(i - 1) - dg(i));
        acc += std::max(inc, 0.0);
        out.gamma[i] = pref * acc;
    }
    return out;
}

DecoherenceSeries oracle_exponent(const bath::BathDiscretization& bath, const DriveDifference& dd,
                                  double T) {
    DecoherenceSeries out;
    out.t = dd.t;
    out.gamma = bath::decoherence_exponent_oracle(bath, dd, T);
    out.source = GammaSource::Oracle;
    return out;
}

namespace {

// (1 − cos x)/x, series below |x| = 1e-4
double one_minus_cos_over(double x) {
    if (std::abs(x) < 1e-4) return x / 2.0 - x * x * x / 24.0;
    const double s = std::sin(0.5 * x);
    return 2.0 * s * s / x;
}

}  // namespace

double weight_w(double u, double omega_max_t) {
    if (!(u >= 0.0 && u <= 1.0)) throw DomainError("weight_w: u must lie in [0, 1]");
    return omega_max_t * (one_minus_cos_over(omega_max_t * (1.0 - u)) + one_minus_cos_over(omega_max_t * u));
}

HartreeErrorEstimate hartree_error(const quantum::ExpectationSeries& s, double C, double omega_max,
                                   double t_eval) {
    if (!(C > 0.0)) throw DomainError("coupling C must be > 0");
    if (!(omega_max > 0.0)) throw DomainError("omega_max must be > 0");
    if (!(t_eval > 0.0)) throw DomainError("t_eval must be > 0");
    if (s.size() < 2 || s.t.front() != 0.0) throw DomainError("variance series must start at t = 0");
    if (s.t.back() < t_eval * (1.0 - 1e-12)) throw DomainError("variance series ends before t_eval");

    std::vector<double> u, v;
    for (std::size_t i = 0; i < s.size() && s.t[i] <= t_eval; ++i) {
        u.push_back(s.t[i] / t_eval);
        v.push_back(s.var_qx[i] + s.var_qy[i]);
    }
    if (u.back() < 1.0) {
        // linear interpolation to t_eval
        const std::size_t k = u.size();
        const double a = (t_eval - s.t[k - 1]) / (s.t[k] - s.t[k - 1]);
        u.push_back(1.0);
        v.push_back((1.0 - a) * (s.var_qx[k - 1] + s.var_qy[k - 1]) + a * (s.var_qx[k] + s.var_qy[k]));
    }
    if (u.size() < 2) throw DomainError("variance series too short");

    const double Om = omega_max * t_eval;
    double integral = 0.0;
    double prev = v[0] * weight_w(0.0, Om);
    for (std::size_t i = 1; i < u.size(); ++i) {
        const double cur = v[i] * weight_w(std::min(u[i], 1.0), Om);
        integral += 0.5 * (u[i] - u[i - 1]) * (prev + cur);
        prev = cur;
    }

    HartreeErrorEstimate out;
    out.t = t_eval;
    out.omega_max = omega_max;
    out.value = C / (2.0 * std::numbers::pi) * integral;
    if (Om < kHartreeOmegaFloor) {
        out.warning = "omega_max * t = " + std::to_string(Om) + " is below the asymptotic floor " +
                      std::to_string(kHartreeOmegaFloor);
    }
    return out;
}

RegimeComparison compare_regimes(const DecoherenceSeries& regular, const DecoherenceSeries& chaotic,
                                 std::optional<double> regular_break, std::optional<double> chaotic_break) {
    if (regular.t.size() != regular.gamma.size() || chaotic.t.size() != chaotic.gamma.size()) {
        throw GridMismatchError("gamma series and time grid differ in length");
    }
    if (regular.t.size() != chaotic.t.size()) throw GridMismatchError("regimes are sampled on different grids");
    for (std::size_t i = 0; i < regular.t.size(); ++i) {
        if (std::abs(regular.t[i] - chaotic.t[i]) > 1e-9 * std::max(1.0, std::abs(regular.t[i]))) {
            throw GridMismatchError("regimes are sampled on different grids");
        }
    }
    if (regular.t.empty()) throw GridMismatchError("empty gamma series");

    RegimeComparison out;
    out.window_end = regular.t.back();
    if (regular_break) out.window_end = std::min(out.window_end, *regular_break);
    if (chaotic_break) out.window_end = std::min(out.window_end, *chaotic_break);

    for (std::size_t i = 0; i < regular.t.size() && regular.t[i] <= out.window_end; ++i) {
        const double r = regular.gamma[i];
        const double c = chaotic.gamma[i];
        out.t.push_back(regular.t[i]);
        out.gamma_regular.push_back(r);
        out.gamma_chaotic.push_back(c);
        if (r == 0.0 && c == 0.0) {
            out.ratio.push_back(1.0);
        } else if (r == 0.0) {
            out.ratio.push_back(std::numeric_limits<double>::infinity());
        } else {
            out.ratio.push_back(c / r);
        }
    }

    std::size_t last = 0;
    for (std::size_t i = 1; i < out.t.size(); ++i) {
        const double a = out.gamma_chaotic[i - 1] - out.gamma_regular[i - 1];
        const double b = out.gamma_chaotic[i] - out.gamma_regular[i];
        if (a <= 0.0 && b > 0.0) {
            out.t_star = out.t[i - 1] + (out.t[i] - out.t[i - 1]) * (-a) / (b - a);
            last = i;
        }
    }
    if (out.t_star) {
        out.chaotic_dominates = true;
        for (std::size_t i = last; i < out.t.size(); ++i) {
            if (!(out.gamma_chaotic[i] > out.gamma_regular[i])) out.chaotic_dominates = false;
        }
    }

    const classical::FitWindow w{out.t.size() > 1 ? out.t[1] : 0.0, out.window_end};
    try {
        out.fit_regular = classical::classify_scaling(out.t, out.gamma_regular, w);
    } catch (const FitError&) {
    }
    try {
        out.fit_chaotic = classical::classify_scaling(out.t, out.gamma_chaotic, w);
    } catch (const FitError&) {
    }
    return out;
}

}  // namespace decoh::decoherence
