#include "decoh/harness.hpp"

#include <openssl/evp.h>

#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>

#ifndef DECOH_VERSION
#define DECOH_VERSION "0.0.0"
#endif

namespace decoh::harness {

namespace fs = std::filesystem;
using nlohmann::json;
using decoherence::DecoherenceSeries;

std::string format_number(double v) {
    std::array<char, 64> buf{};
    auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::general, 17);
    return std::string(buf.data(), res.ptr);
}

std::string sha256_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read " + path.string() + " for checksumming");
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (!ctx) throw Error("EVP_MD_CTX_new failed");
    EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
    std::array<char, 1 << 16> buf{};
    while (in) {
        in.read(buf.data(), buf.size());
        if (in.gcount() > 0) EVP_DigestUpdate(ctx, buf.data(), static_cast<std::size_t>(in.gcount()));
    }
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx, md.data(), &len);
    EVP_MD_CTX_free(ctx);
    std::ostringstream os;
    for (unsigned i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
    return os.str();
}

namespace {

class CsvWriter {
public:
    CsvWriter(const fs::path& path, const std::vector<std::string>& header) : out_(path, std::ios::binary) {
        if (!out_) throw Error("cannot open " + path.string() + " for writing");
        for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
        out_ << '\n';
    }
    void row(std::initializer_list<double> values, std::string_view tag = {}) {
        bool first = true;
        for (double v : values) {
            if (!first) out_ << ',';
            out_ << format_number(v);
            first = false;
        }
        if (!tag.empty()) out_ << ',' << tag;
        out_ << '\n';
    }

private:
    std::ofstream out_;
};

std::string utc_stamp() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y%m%dT%H%M%SZ", &tm);
    return buf;
}

fs::path fresh_dir(const fs::path& root, const std::string& name) {
    fs::path dir = root / name;
    for (int k = 2; fs::exists(dir); ++k) dir = root / (name + "-" + std::to_string(k));
    fs::create_directories(dir);
    return dir;
}

fs::path output_root(const ExperimentConfig& c, const RunOptions& o) {
    if (o.out_root) return *o.out_root;
    if (!c.output_dir.empty()) return c.output_dir;
    return default_output_root();
}

json fit_json(const classical::ScalingFit& f) {
    return {{"kind", std::string(classical::to_string(f.kind))},
            {"exponent_or_rate", f.exponent_or_rate},
            {"log_prefactor", f.log_prefactor},
            {"r_squared", f.r_squared},
            {"t_lo", f.window.t_lo},
            {"t_hi", f.window.t_hi},
            {"samples", f.samples}};
}

json classification_json(const classical::ScalingClassification& c) {
    return {{"best", std::string(classical::to_string(c.best.kind))},
            {"ambiguous", c.ambiguous},
            {"power_law", fit_json(c.power_law)},
            {"exponential", fit_json(c.exponential)}};
}

// Runs `f` and stores either its json or the error message under `key`.
template <class F>
void try_fit(json& into, const std::string& key, F&& f) {
    try {
        into[key] = f();
    } catch (const FitError& e) {
        into[key] = {{"error", e.what()}};
    }
}

void write_gamma(const fs::path& path, const DecoherenceSeries& a, const std::optional<DecoherenceSeries>& o,
                 std::string_view engine) {
    std::vector<std::string> header{"t", "gamma_asymptotic"};
    if (o) header.push_back("gamma_oracle");
    header.push_back("engine");
    CsvWriter w(path, header);
    for (std::size_t i = 0; i < a.t.size(); ++i) {
        if (o) {
            w.row({a.t[i], a.gamma[i], o->gamma[i]}, engine);
        } else {
            w.row({a.t[i], a.gamma[i]}, engine);
        }
    }
}

json oracle_summary(const DecoherenceSeries& a, const DecoherenceSeries& o) {
    double max_rel = 0.0;
    const std::size_t n = a.t.size();
    for (std::size_t i = n / 2; i < n; ++i) {
        if (a.gamma[i] > 0.0) max_rel = std::max(max_rel, std::abs(o.gamma[i] - a.gamma[i]) / a.gamma[i]);
    }
    const double final_rel = a.gamma.back() > 0.0 ? std::abs(o.gamma.back() - a.gamma.back()) / a.gamma.back() : 0.0;
    return {{"relative_difference_final", final_rel}, {"max_relative_difference_second_half", max_rel}};
}

void add_check(RunRecord& r, std::string name, double value, double target, double tol) {
    r.tolerances.push_back({std::move(name), value, target, tol, std::abs(value - target) <= tol});
}

struct Context {
    const ExperimentConfig& c;
    models::HamiltonianModel model;
    RunRecord& rec;

    void record_manifest(const fs::path& file) {
        rec.manifest.push_back({fs::relative(file, rec.dir).generic_string(), sha256_file(file), fs::file_size(file)});
    }
};

void write_trajectory(Context& cx, const classical::Trajectory& tr) {
    const fs::path p = cx.rec.dir / "trajectory.csv";
    {
        CsvWriter w(p, {"t", "qx", "qy", "px", "py", "energy"});
        for (std::size_t i = 0; i < tr.t.size(); ++i) {
            const auto& z = tr.z[i];
            w.row({tr.t[i], z.qx, z.qy, z.px, z.py, tr.energy[i]});
        }
    }
    cx.record_manifest(p);
}

void write_expectations(Context& cx, const quantum::ExpectationSeries& s, const std::string& name) {
    const fs::path p = cx.rec.dir / name;
    {
        CsvWriter w(p, {"t", "mean_qx", "mean_qy", "var_qx", "var_qy", "mean_px", "mean_py", "var_px", "var_py",
                        "norm", "energy", "edge_probability"});
        const bool mom = s.has_momentum();
        for (std::size_t i = 0; i < s.size(); ++i) {
            w.row({s.t[i], s.mean_qx[i], s.mean_qy[i], s.var_qx[i], s.var_qy[i], mom ? s.mean_px[i] : NAN,
                   mom ? s.mean_py[i] : NAN, mom ? s.var_px[i] : NAN, mom ? s.var_py[i] : NAN, s.norm[i],
                   s.energy.empty() ? NAN : s.energy[i], s.edge_probability[i]});
        }
    }
    cx.record_manifest(p);
}

void classical_stages(Context& cx, unsigned stages, double diameter, double period) {
    const auto& c = cx.c;
    auto& rec = cx.rec;
    const classical::PropagateOptions popts{c.integrator.sample_every, c.integrator.escape_radius,
                                            c.integrator.energy_drift_bound};

    if (stages & kPropagate) {
        try {
            const auto tr = classical::propagate(cx.model, c.z, c.integrator.dt, c.integrator.n_steps, popts);
            write_trajectory(cx, tr);
            rec.results["trajectory"] = {{"file", "trajectory.csv"},
                                         {"max_relative_energy_drift", tr.max_relative_energy_drift()}};
        } catch (const classical::EscapeError& e) {
            if (!e.partial().t.empty()) write_trajectory(cx, e.partial());
            rec.errors.push_back(std::string("propagate: ") + e.what());
        }
    }

    if (stages & kLyapunov && c.lyapunov.enabled) {
        const auto est = classical::max_lyapunov(cx.model, c.z, c.lyapunov.dt.value_or(c.integrator.dt),
                                                 c.lyapunov.total_time, c.lyapunov.renorm_interval, c.seed,
                                                 c.integrator.escape_radius);
        const fs::path p = rec.dir / "lyapunov.csv";
        {
            CsvWriter w(p, {"t", "lambda"});
            for (std::size_t i = 0; i < est.t.size(); ++i) w.row({est.t[i], est.convergence[i]});
        }
        cx.record_manifest(p);
        rec.lambda = est.lambda_max;
        rec.results["lyapunov"] = {{"file", "lyapunov.csv"},
                                   {"lambda_max", est.lambda_max},
                                   {"seed", c.seed},
                                   {"total_time", est.total_time},
                                   {"renorm_interval", est.renorm_interval}};
    }

    if (!(stages & (kDivergence | kDecohere))) return;

    const auto div = classical::divergence_integral(cx.model, c.z, c.delta_z, c.integrator.dt, c.integrator.n_steps,
                                                    popts);
    {
        const fs::path p = rec.dir / "divergence.csv";
        {
            CsvWriter w(p, {"t", "D", "separation", "energy_drift"});
            for (std::size_t i = 0; i < div.t.size(); ++i) {
                w.row({div.t[i], div.D[i], div.separation[i], div.energy_drift[i]});
            }
        }
        cx.record_manifest(p);
    }

    json dj = {{"file", "divergence.csv"}, {"shell_diameter", diameter}, {"period", period}};
    std::optional<classical::ScalingClassification> regular_fit, chaotic_fit;
    std::optional<classical::ScalingFit> ensemble_fit;
    classical::FitWindow reg_window{}, cha_window{};
    try_fit(dj, "regular_window", [&] {
        reg_window = classical::regular_fit_window(div, period, c.fit.transient_periods);
        regular_fit = classical::classify_scaling(div, reg_window);
        return classification_json(*regular_fit);
    });
    try_fit(dj, "chaotic_window", [&] {
        cha_window = classical::chaotic_fit_window(div, diameter, c.fit.saturation_fraction, c.fit.growth_before_fit);
        chaotic_fit = classical::classify_scaling(div, cha_window);
        return classification_json(*chaotic_fit);
    });
    if (c.fit.ensemble_members > 0) {
        const long steps = c.fit.ensemble_steps > 0 ? c.fit.ensemble_steps : c.integrator.n_steps;
        const auto ens = classical::ensemble_divergence(cx.model, c.z, c.delta_z, c.integrator.dt, steps,
                                                        c.fit.ensemble_members, c.fit.ensemble_spacing, popts);
        const fs::path p = rec.dir / "ensemble_divergence.csv";
        {
            CsvWriter w(p, {"t", "mean_log_D", "mean_log_separation", "max_separation"});
            for (std::size_t i = 0; i < ens.t.size(); ++i) {
                w.row({ens.t[i], ens.mean_log_D[i], ens.mean_log_separation[i], ens.max_separation[i]});
            }
        }
        cx.record_manifest(p);
        try_fit(dj, "ensemble", [&] {
            const auto win = classical::ensemble_fit_window(ens, diameter, c.fit.saturation_fraction,
                                                            c.fit.growth_before_fit);
            ensemble_fit = classical::ensemble_rate(ens, win);
            json j = fit_json(*ensemble_fit);
            j["file"] = "ensemble_divergence.csv";
            j["members"] = c.fit.ensemble_members;
            if (rec.lambda && *rec.lambda > 0.0) j["ratio_to_2lambda"] = ensemble_fit->exponent_or_rate / (2.0 * *rec.lambda);
            return j;
        });
    }
    // finite δz against the linearized map while |Δq| < 1e-3 of the shell diameter
    if (c.delta_z.norm() > 0.0 && diameter > 0.0) {
        const double dev = classical::tangent_crosscheck(cx.model, c.z, c.delta_z, c.integrator.dt,
                                                         c.integrator.n_steps, diameter, 1.0e-3);
        dj["tangent_crosscheck"] = dev;
        rec.tolerances.push_back({"tangent cross-check deviation <= 0.01", dev, 0.0, 0.01, dev <= 0.01});
    }

    // starts near periodic orbits or on islands break the expected growth law; flag them so the
    // caller can pick another initial condition
    json flags = json::array();
    if (c.fit.expect == Expectation::Chaotic && rec.lambda && *rec.lambda < 1.0e-3) {
        flags.push_back("lambda " + format_number(*rec.lambda) + " is near zero; the start may lie on a regular island");
    }
    if (c.fit.expect == Expectation::Chaotic && chaotic_fit && chaotic_fit->best.kind != classical::ScalingKind::Exponential) {
        flags.push_back("chaotic window prefers a power law");
    }
    if (c.fit.expect == Expectation::Regular && regular_fit &&
        (regular_fit->ambiguous || regular_fit->best.kind != classical::ScalingKind::PowerLaw)) {
        flags.push_back("regular window is not a clean power law; the start may be near a periodic orbit or separatrix");
    }
    if (!flags.empty()) dj["initial_condition_flags"] = flags;
    rec.results["divergence"] = dj;

    if (c.fit.expect == Expectation::Regular && regular_fit) {
        add_check(rec, "divergence power-law exponent", regular_fit->power_law.exponent_or_rate, 3.0, 0.2);
        rec.tolerances.push_back({"divergence power-law r_squared >= 0.999", regular_fit->power_law.r_squared, 1.0,
                                  0.001, regular_fit->power_law.r_squared >= 0.999});
    }
    if (c.fit.expect == Expectation::Chaotic && rec.lambda) {
        const double rate = ensemble_fit ? ensemble_fit->exponent_or_rate
                            : chaotic_fit ? chaotic_fit->exponential.exponent_or_rate
                                          : NAN;
        if (std::isfinite(rate)) {
            add_check(rec, "divergence rate / (2 lambda)", rate / (2.0 * *rec.lambda), 1.0, 0.2);
        }
    }

    if (!(stages & kDecohere)) return;

    const auto dd = bath::drive_difference(div);
    const auto gamma = decoherence::asymptotic_exponent(dd, c.bath.density.C, c.bath.T);
    std::optional<DecoherenceSeries> oracle;
    if (c.bath.oracle && !dd.is_zero()) {
        oracle = decoherence::oracle_exponent(bath::discretize_bath(c.bath.density, c.bath.n_modes), dd, c.bath.T);
    } else if (c.bath.oracle) {
        oracle = DecoherenceSeries{dd.t, std::vector<double>(dd.size(), 0.0), decoherence::GammaSource::Oracle};
    }
    const fs::path p = rec.dir / "gamma.csv";
    write_gamma(p, gamma, oracle, "classical");
    cx.record_manifest(p);
    rec.gamma_classical = gamma;

    json gj = {{"file", "gamma.csv"}, {"engine", "classical"}};
    if (regular_fit) try_fit(gj, "regular_window", [&] {
            return classification_json(classical::classify_scaling(gamma.t, gamma.gamma, reg_window));
        });
    if (chaotic_fit) try_fit(gj, "chaotic_window", [&] {
            return classification_json(classical::classify_scaling(gamma.t, gamma.gamma, cha_window));
        });
    if (oracle) gj["oracle"] = oracle_summary(gamma, *oracle);
    gj["bath"] = {{"C", c.bath.density.C}, {"omega_max", c.bath.density.omega_max},
                  {"n_modes", c.bath.n_modes}, {"T", c.bath.T}};
    rec.results["gamma"] = gj;
}

void quantum_stages(Context& cx, unsigned stages, double diameter) {
    const auto& c = cx.c;
    auto& rec = cx.rec;
    if (!(stages & (kPropagate | kDecohere))) return;
    const auto& q = c.quantum;
    const double sx = q.sigma_x.value_or(std::sqrt(q.grid.hbar / (2.0 * c.model.mass)));
    const double sy = q.sigma_y.value_or(std::sqrt(q.grid.hbar / (2.0 * c.model.mass)));
    const quantum::WavepacketOptions wo{q.edge_tolerance, 4, q.norm_tolerance, true};

    auto run_packet = [&](const models::PhasePoint& z, const std::string& file) -> std::optional<quantum::ExpectationSeries> {
        auto st = quantum::init_gaussian(q.grid, z, sx, sy);
        try {
            auto s = quantum::propagate_wavepacket(st, cx.model, q.dt, q.n_steps, q.sample_every, wo);
            write_expectations(cx, s, file);
            return s;
        } catch (const quantum::WavepacketError& e) {
            write_expectations(cx, e.partial(), file);
            rec.errors.push_back("quantum " + file + ": " + e.what());
            return std::nullopt;
        }
    };

    json qj = {{"hbar", q.grid.hbar}, {"grid", {{"nx", q.grid.nx}, {"ny", q.grid.ny}, {"Lx", q.grid.Lx}, {"Ly", q.grid.Ly}}},
               {"sigma_x", sx}, {"sigma_y", sy}};
    const auto first = run_packet(c.z, "expectations.csv");
    if (first) {
        qj["file"] = "expectations.csv";
        const double t_end = first->t.back();
        const long steps = static_cast<long>(std::ceil(t_end / c.integrator.dt)) + 1;
        const auto ref = classical::propagate(cx.model, c.z, c.integrator.dt, steps);
        const double threshold = q.break_fraction * diameter;
        rec.break_time = quantum::ehrenfest_break_time(*first, ref, c.model.mass, threshold);
        qj["break_threshold"] = threshold;
        qj["break_time"] = rec.break_time ? json(*rec.break_time) : json(nullptr);
        qj["max_ehrenfest_deviation"] = quantum::max_ehrenfest_deviation(*first, ref, c.model.mass);
        qj["final_norm_drift"] = std::abs(first->norm.back() - first->norm.front());
    }
    if (q.pair && (stages & kDecohere) && first) {
        const auto second = run_packet(c.z + c.delta_z, "expectations_shifted.csv");
        if (second) {
            const auto dd = bath::drive_difference(*first, *second, c.model.mass);
            const auto gamma = decoherence::asymptotic_exponent(dd, c.bath.density.C, c.bath.T);
            std::optional<DecoherenceSeries> oracle;
            if (c.bath.oracle) {
                oracle = decoherence::oracle_exponent(bath::discretize_bath(c.bath.density, c.bath.n_modes), dd,
                                                      c.bath.T);
            }
            const fs::path p = rec.dir / "gamma_quantum.csv";
            write_gamma(p, gamma, oracle, "quantum");
            cx.record_manifest(p);
            rec.gamma_quantum = gamma;
            qj["gamma_file"] = "gamma_quantum.csv";
            if (oracle) qj["oracle"] = oracle_summary(gamma, *oracle);
        }
    }
    rec.results["quantum"] = qj;
}

json tolerances_json(const std::vector<ToleranceCheck>& checks) {
    json arr = json::array();
    for (const auto& t : checks) {
        arr.push_back({{"name", t.name}, {"value", t.value}, {"target", t.target}, {"tolerance", t.tolerance},
                       {"pass", t.pass}});
    }
    return arr;
}

json manifest_json(const std::vector<ManifestEntry>& m) {
    json arr = json::array();
    for (const auto& e : m) arr.push_back({{"file", e.file}, {"sha256", e.sha256}, {"bytes", e.bytes}});
    return arr;
}

void write_text(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw Error("cannot open " + p.string() + " for writing");
    out << text;
}

}  // namespace

bool RunRecord::all_pass() const {
    for (const auto& t : tolerances) {
        if (!t.pass) return false;
    }
    return true;
}

fs::path default_output_root() {
    if (const char* env = std::getenv(kOutputRootEnv); env && *env) return env;
    return "runs";
}

RunRecord run_experiment(const ExperimentConfig& config, const RunOptions& options) {
    if (auto problems = validate(config); !problems.empty()) throw ValidationError(std::move(problems));
    const auto t0 = std::chrono::steady_clock::now();

    RunRecord rec;
    rec.config = config;
    const std::string stamp = options.timestamp.value_or(utc_stamp());
    if (options.run_dir) {
        rec.dir = *options.run_dir;
        fs::create_directories(rec.dir);
    } else {
        rec.dir = fresh_dir(output_root(config, options), stamp + "-" + config.name);
    }

    Context cx{config, config.model.build(), rec};
    write_text(rec.dir / "config.snapshot", to_json(config));
    cx.record_manifest(rec.dir / "config.snapshot");

    // Shell scale and natural period from a long orbit; the step matches the run.
    double diameter = 0.0, period = 0.0;
    try {
        const long shell_steps = std::max(static_cast<long>(std::ceil(config.fit.shell_time / config.integrator.dt)), config.integrator.n_steps);
        const auto shell = classical::propagate(cx.model, config.z, config.integrator.dt, shell_steps,
                                                {std::max(1, static_cast<int>(shell_steps / 200000)),
                                                 config.integrator.escape_radius, std::nullopt});
        diameter = classical::position_extent(shell);
        period = classical::estimate_period(shell);
    } catch (const classical::EscapeError& e) {
        diameter = classical::position_extent(e.partial().t.empty() ? classical::Trajectory{{0.0}, {config.z}, {0.0}}
                                                                    : e.partial());
        rec.errors.push_back(std::string("shell orbit: ") + e.what());
    } catch (const Error& e) {
        rec.errors.push_back(std::string("shell orbit: ") + e.what());
    }
    rec.results["shell"] = {{"diameter", diameter}, {"period", period},
                            {"energy", models::total_energy(cx.model, config.z)}};

    try {
        if (config.engine != Engine::Quantum) classical_stages(cx, options.stages, diameter, period);
        if (config.engine != Engine::Classical) quantum_stages(cx, options.stages, diameter);
    } catch (const Error& e) {
        rec.errors.push_back(e.what());
    }

    rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    json r = {{"schema_version", kSchemaVersion},
              {"config_snapshot", "config.snapshot"},
              {"version", DECOH_VERSION},
              {"compiler", __VERSION__},
              {"started_utc", stamp},
              {"wall_clock_seconds", rec.wall_seconds},
              {"manifest", manifest_json(rec.manifest)},
              {"results", rec.results},
              {"tolerances", tolerances_json(rec.tolerances)},
              {"errors", rec.errors},
              {"status", rec.partial() ? "partial" : "ok"}};
    write_text(rec.dir / "record.json", r.dump(2) + "\n");
    return rec;
}

std::vector<std::string> matching_problems(const ExperimentConfig& a, const ExperimentConfig& b) {
    std::vector<std::string> bad;
    auto rel = [](double x, double y) { return std::abs(x - y) / std::max({std::abs(x), std::abs(y), 1e-300}); };
    if (rel(a.bath.density.C, b.bath.density.C) > 1e-12) bad.push_back("matching rule bath.C: coupling constants differ");
    if (rel(a.bath.T, b.bath.T) > 1e-12) bad.push_back("matching rule bath.T: temperatures differ");
    if (rel(a.delta_z.norm(), b.delta_z.norm()) > 1e-9) bad.push_back("matching rule |delta_z|: offset magnitudes differ");
    try {
        const double ea = models::total_energy(a.model.build(), a.z);
        const double eb = models::total_energy(b.model.build(), b.z);
        if (rel(ea, eb) > 0.01) {
            bad.push_back("matching rule energy: energies " + format_number(ea) + " and " + format_number(eb) +
                          " differ by more than 1%");
        }
    } catch (const Error& e) {
        bad.push_back(std::string("matching rule energy: ") + e.what());
    }
    if (rel(a.integrator.sample_interval(), b.integrator.sample_interval()) > 1e-12 ||
        std::abs(a.integrator.dt * a.integrator.n_steps - b.integrator.dt * b.integrator.n_steps) >
            1e-9 * a.integrator.dt * a.integrator.n_steps) {
        bad.push_back("matching rule time grid: drive sample interval and duration must agree");
    }
    return bad;
}

namespace {

void write_comparison(ComparisonRecord& out, std::optional<double> reg_break, std::optional<double> cha_break) {
    const auto& cmp = out.comparison;
    const fs::path p = out.dir / "comparison.csv";
    {
        CsvWriter w(p, {"t", "gamma_regular", "gamma_chaotic", "ratio"});
        for (std::size_t i = 0; i < cmp.t.size(); ++i) {
            w.row({cmp.t[i], cmp.gamma_regular[i], cmp.gamma_chaotic[i], cmp.ratio[i]});
        }
    }
    out.manifest.push_back({"comparison.csv", sha256_file(p), fs::file_size(p)});

    auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
    json rep = {{"engine", out.engine},
                {"chaotic_dominates", cmp.chaotic_dominates},
                {"t_star", opt(cmp.t_star)},
                {"window_end", cmp.window_end},
                {"regular_break_time", opt(reg_break)},
                {"chaotic_break_time", opt(cha_break)},
                {"final_ratio", cmp.ratio.empty() ? json(nullptr) : json(cmp.ratio.back())}};
    const bool inside = cmp.t_star && (!reg_break || *cmp.t_star < *reg_break) && (!cha_break || *cmp.t_star < *cha_break);
    rep["t_star_inside_windows"] = inside;
    if (cmp.fit_regular) rep["fit_regular"] = classification_json(*cmp.fit_regular);
    if (cmp.fit_chaotic) rep["fit_chaotic"] = classification_json(*cmp.fit_chaotic);
    out.report = rep;

    json r = {{"schema_version", kSchemaVersion}, {"version", DECOH_VERSION}, {"report", rep},
              {"manifest", manifest_json(out.manifest)}};
    write_text(out.dir / "record.json", r.dump(2) + "\n");
}

}  // namespace

ComparisonRecord compare_command(const ExperimentConfig& regular, const ExperimentConfig& chaotic,
                                 const RunOptions& options) {
    if (auto bad = matching_problems(regular, chaotic); !bad.empty()) throw MismatchError(std::move(bad));

    ComparisonRecord out;
    const std::string stamp = options.timestamp.value_or(utc_stamp());
    out.dir = options.run_dir ? *options.run_dir
                              : fresh_dir(output_root(regular, options),
                                          stamp + "-compare-" + regular.name + "-vs-" + chaotic.name);
    fs::create_directories(out.dir);

    RunOptions sub = options;
    sub.stages = kAllStages;
    sub.timestamp = stamp;
    sub.run_dir = out.dir / "regular";
    out.regular = run_experiment(regular, sub);
    sub.run_dir = out.dir / "chaotic";
    out.chaotic = run_experiment(chaotic, sub);
    for (const auto* r : {&*out.regular, &*out.chaotic}) {
        const auto rel = fs::relative(r->dir / "record.json", out.dir).generic_string();
        out.manifest.push_back({rel, sha256_file(r->dir / "record.json"), fs::file_size(r->dir / "record.json")});
    }

    const RunRecord& R = *out.regular;
    const RunRecord& C = *out.chaotic;
    const DecoherenceSeries* gr = R.gamma_classical ? &*R.gamma_classical : (R.gamma_quantum ? &*R.gamma_quantum : nullptr);
    const DecoherenceSeries* gc = C.gamma_classical ? &*C.gamma_classical : (C.gamma_quantum ? &*C.gamma_quantum : nullptr);
    if (!gr || !gc) throw Error("comparison needs a gamma series from both runs");
    out.engine = R.gamma_classical ? "classical" : "quantum";
    out.comparison = decoherence::compare_regimes(*gr, *gc, R.break_time, C.break_time);
    write_comparison(out, R.break_time, C.break_time);
    return out;
}

ComparisonRecord compare_injected(const DecoherenceSeries& regular, const DecoherenceSeries& chaotic,
                                  std::optional<double> regular_break, std::optional<double> chaotic_break,
                                  const fs::path& dir) {
    ComparisonRecord out;
    out.dir = dir;
    fs::create_directories(dir);
    out.engine = "injected";
    out.comparison = decoherence::compare_regimes(regular, chaotic, regular_break, chaotic_break);
    write_comparison(out, regular_break, chaotic_break);
    return out;
}

}  // namespace decoh::harness
