#include "decoh/scaling_fit.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace decoh::classical {

namespace {

struct LineFit {
    double slope{0.0};
    double intercept{0.0};
    double r_squared{0.0};
};

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
    const auto n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (sxx == 0.0) throw FitError("fit window spans a single abscissa");
    if (std::all_of(y.begin(), y.end(), [&](double v) { return v == y.front(); })) {
        throw FitError("degenerate fit window: all values equal");
    }
    LineFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (fit.intercept + fit.slope * x[i]);
        ss_res += r * r;
    }
    fit.r_squared = std::clamp(1.0 - ss_res / syy, 0.0, 1.0);
    return fit;
}

}  // namespace

std::string_view to_string(ScalingKind kind) {
    return kind == ScalingKind::PowerLaw ? "PowerLaw" : "Exponential";
}

ScalingClassification classify_scaling(std::span<const double> t, std::span<const double> D,
                                       FitWindow window) {
    if (t.size() != D.size()) throw FitError("time and value series differ in length");
    if (!(window.t_lo < window.t_hi)) throw FitError("fit window must satisfy t_lo < t_hi");

    std::vector<double> lt, ld, tt;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] < window.t_lo || t[i] > window.t_hi) continue;
        if (!(t[i] > 0.0 && D[i] > 0.0)) continue;
        tt.push_back(t[i]);
        lt.push_back(std::log(t[i]));
        ld.push_back(std::log(D[i]));
    }
    if (tt.size() < kMinFitSamples) {
        throw FitError("fit window holds fewer than " + std::to_string(kMinFitSamples) +
                       " positive samples");
    }

    const LineFit pow_fit = least_squares(lt, ld);
    const LineFit exp_fit = least_squares(tt, ld);

    ScalingClassification out;
    out.power_law = {ScalingKind::PowerLaw, pow_fit.slope, pow_fit.intercept, pow_fit.r_squared,
                     window, tt.size()};
    out.exponential = {ScalingKind::Exponential, exp_fit.slope, exp_fit.intercept, exp_fit.r_squared,
                       window, tt.size()};
    out.best = pow_fit.r_squared >= exp_fit.r_squared ? out.power_law : out.exponential;
    out.ambiguous = std::abs(pow_fit.r_squared - exp_fit.r_squared) < kTieMargin;
    return out;
}

ScalingClassification classify_scaling(const DivergenceSeries& series, FitWindow window) {
    return classify_scaling(series.t, series.D, window);
}

FitWindow regular_fit_window(const DivergenceSeries& series, double period, double transient_periods) {
    if (series.t.empty()) throw FitError("empty divergence series");
    return {transient_periods * period, series.t.back()};
}

FitWindow chaotic_fit_window(const DivergenceSeries& series, double shell_diameter,
                             double saturation_fraction, double growth_before_fit) {
    if (series.t.empty()) throw FitError("empty divergence series");
    const double initial = series.delta.empty() ? series.separation.front() : series.delta.front().norm();
    const double limit = saturation_fraction * shell_diameter;
    FitWindow w{series.t.front(), series.t.back()};
    bool started = false;
    for (std::size_t i = 0; i < series.t.size(); ++i) {
        if (!started && initial > 0.0 && series.separation[i] > growth_before_fit * initial) {
            w.t_lo = series.t[i];
            started = true;
        }
        if (series.separation[i] > limit) {
            w.t_hi = series.t[i > 0 ? i - 1 : 0];
            break;
        }
    }
    return w;
}

}  // namespace decoh::classical

namespace decoh::classical {

FitWindow ensemble_fit_window(const EnsembleDivergence& ens, double shell_diameter,
                              double saturation_fraction, double growth_before_fit) {
    if (ens.t.empty()) throw FitError("empty ensemble");
    const double start = std::log(growth_before_fit * ens.delta_norm);
    const double limit = saturation_fraction * shell_diameter;
    FitWindow w{ens.t.back(), ens.t.back()};
    bool started = false;
    for (std::size_t i = 0; i < ens.t.size(); ++i) {
        if (ens.max_separation[i] > limit) {
            w.t_hi = ens.t[i > 0 ? i - 1 : 0];
            break;
        }
        if (!started && ens.mean_log_separation[i] > start) {
            w.t_lo = ens.t[i];
            started = true;
        }
    }
    if (!started) throw FitError("ensemble separation never left the linear start-up");
    return w;
}

ScalingFit ensemble_rate(const EnsembleDivergence& ens, FitWindow window) {
    std::vector<double> tt, ld;
    for (std::size_t i = 0; i < ens.t.size(); ++i) {
        if (ens.t[i] < window.t_lo || ens.t[i] > window.t_hi || ens.t[i] <= 0.0) continue;
        tt.push_back(ens.t[i]);
        ld.push_back(ens.mean_log_D[i]);
    }
    if (tt.size() < kMinFitSamples) throw FitError("ensemble fit window holds too few samples");
    const LineFit f = least_squares(tt, ld);
    return {ScalingKind::Exponential, f.slope, f.intercept, f.r_squared, window, tt.size()};
}

}  // namespace decoh::classical
