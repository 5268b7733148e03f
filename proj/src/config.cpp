#include "decoh/config.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

namespace decoh::harness {

using nlohmann::json;

namespace {

struct FamilyParams {
    std::string_view family;
    std::vector<std::pair<std::string, double>> defaults;
};

const std::vector<FamilyParams>& family_params() {
    static const std::vector<FamilyParams> table = {
        {"Harmonic2D", {{"omega_x", 1.0}, {"omega_y", 1.0}}},
        {"InvertedHarmonic1DEmbedded", {{"k", 1.0}}},
        {"SeparableQuartic", {{"a", 1.0}, {"b", 1.0}}},
        {"HenonHeiles", {{"lambda", 1.0}}},
        {"PullenEdmonds", {{"alpha", 1.0}}},
    };
    return table;
}

const FamilyParams* find_family(std::string_view name) {
    for (const auto& f : family_params()) {
        if (f.family == name) return &f;
    }
    return nullptr;
}

std::string valid_families() {
    std::string s;
    for (auto name : models::kFamilyNames) {
        if (!s.empty()) s += ", ";
        s += name;
    }
    return s;
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

// Walks a JSON object, records type problems and unknown keys.
class Reader {
public:
    Reader(std::vector<std::string>& problems, const json& obj, std::string path)
        : problems_(problems), obj_(obj), path_(std::move(path)) {
        if (!obj_.is_object()) problems_.push_back(where() + "must be an object");
    }

    bool has(const std::string& key) const { return obj_.is_object() && obj_.contains(key); }

    template <class T>
    void get(const std::string& key, T& out) {
        seen_.insert(key);
        if (!has(key)) return;
        read(obj_.at(key), key, out);
    }

    template <class T>
    void get(const std::string& key, std::optional<T>& out) {
        seen_.insert(key);
        if (!has(key) || obj_.at(key).is_null()) return;
        T v{};
        if (read(obj_.at(key), key, v)) out = v;
    }

    template <class T>
    void require(const std::string& key, T& out) {
        if (!has(key)) problems_.push_back(where(key) + "required");
        get(key, out);
    }

    const json* child(const std::string& key) {
        seen_.insert(key);
        if (!has(key)) return nullptr;
        return &obj_.at(key);
    }

    void check_unknown() {
        if (!obj_.is_object()) return;
        for (auto it = obj_.begin(); it != obj_.end(); ++it) {
            if (!seen_.count(it.key())) problems_.push_back(where(it.key()) + "unknown key");
        }
    }

    std::string where(const std::string& key = "") const {
        std::string p = path_.empty() ? key : (key.empty() ? path_ : path_ + "." + key);
        return p.empty() ? "" : p + ": ";
    }

private:
    bool read(const json& j, const std::string& key, double& out) {
        if (!j.is_number()) return fail(key, "expected a number");
        out = j.get<double>();
        return true;
    }
    bool read(const json& j, const std::string& key, long& out) {
        if (!j.is_number_integer()) return fail(key, "expected an integer");
        out = j.get<long>();
        return true;
    }
    bool read(const json& j, const std::string& key, int& out) {
        if (!j.is_number_integer()) return fail(key, "expected an integer");
        const long v = j.get<long>();
        if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
            return fail(key, "integer out of range");
        }
        out = static_cast<int>(v);
        return true;
    }
    bool read(const json& j, const std::string& key, std::uint64_t& out) {
        if (!j.is_number_unsigned()) return fail(key, "expected a non-negative integer");
        out = j.get<std::uint64_t>();
        return true;
    }
    bool read(const json& j, const std::string& key, bool& out) {
        if (!j.is_boolean()) return fail(key, "expected true or false");
        out = j.get<bool>();
        return true;
    }
    bool read(const json& j, const std::string& key, std::string& out) {
        if (!j.is_string()) return fail(key, "expected a string");
        out = j.get<std::string>();
        return true;
    }
    bool read(const json& j, const std::string& key, models::PhasePoint& out) {
        if (!j.is_array() || j.size() != 4 ||
            !std::all_of(j.begin(), j.end(), [](const json& e) { return e.is_number(); })) {
            return fail(key, "expected [qx, qy, px, py]");
        }
        out = {j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
        return true;
    }
    bool read(const json& j, const std::string& key, std::complex<double>& out) {
        if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
            return fail(key, "expected [re, im]");
        }
        out = {j[0].get<double>(), j[1].get<double>()};
        return true;
    }
    bool fail(const std::string& key, const std::string& msg) {
        problems_.push_back(where(key) + msg);
        return false;
    }

    std::vector<std::string>& problems_;
    const json& obj_;
    std::string path_;
    std::set<std::string> seen_;
};

std::string line_col(const std::string& text, std::size_t byte) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

void parse_model(Reader& top, ExperimentConfig& c, std::vector<std::string>& problems) {
    const json* m = top.child("model");
    if (!m) {
        problems.push_back("model: required");
        return;
    }
    Reader r(problems, *m, "model");
    r.require("family", c.model.family);
    r.get("mass", c.model.mass);
    const FamilyParams* fam = find_family(c.model.family);
    if (fam) {
        for (const auto& [name, def] : fam->defaults) c.model.params[name] = def;
    }
    if (const json* p = r.child("params")) {
        if (!p->is_object()) {
            problems.push_back("model.params: must be an object");
        } else {
            for (auto it = p->begin(); it != p->end(); ++it) {
                if (!it->is_number()) {
                    problems.push_back("model.params." + it.key() + ": expected a number");
                    continue;
                }
                c.model.params[it.key()] = it->get<double>();
            }
        }
    }
    r.check_unknown();
}

}  // namespace

std::string_view to_string(Engine e) {
    switch (e) {
        case Engine::Classical: return "classical";
        case Engine::Quantum: return "quantum";
        case Engine::Both: return "both";
    }
    return "classical";
}

std::optional<Engine> parse_engine(std::string_view s) {
    if (s == "classical") return Engine::Classical;
    if (s == "quantum") return Engine::Quantum;
    if (s == "both") return Engine::Both;
    return std::nullopt;
}

models::HamiltonianModel ModelSpec::build() const {
    const FamilyParams* fam = find_family(family);
    if (!fam) {
        throw ValidationError({"model.family: unknown family '" + family + "'; valid families: " +
                               valid_families()});
    }
    auto p = [&](const std::string& k) {
        auto it = params.find(k);
        return it == params.end() ? 0.0 : it->second;
    };
    models::Family f;
    if (family == "Harmonic2D") f = models::Harmonic2D{p("omega_x"), p("omega_y")};
    if (family == "InvertedHarmonic1DEmbedded") f = models::InvertedHarmonic1DEmbedded{p("k")};
    if (family == "SeparableQuartic") f = models::SeparableQuartic{p("a"), p("b")};
    if (family == "HenonHeiles") f = models::HenonHeiles{p("lambda")};
    if (family == "PullenEdmonds") f = models::PullenEdmonds{p("alpha")};
    return models::HamiltonianModel(f, mass);
}

std::vector<std::string> validate(const ExperimentConfig& c) {
    std::vector<std::string> bad;
    auto check = [&](bool ok, const std::string& msg) {
        if (!ok) bad.push_back(msg);
    };
    auto pos = [](double v) { return std::isfinite(v) && v > 0.0; };

    check(c.schema_version == kSchemaVersion,
          "schema_version: unsupported version " + std::to_string(c.schema_version) + " (expected " +
              std::to_string(kSchemaVersion) + ")");
    check(!c.name.empty() && std::all_of(c.name.begin(), c.name.end(),
                                         [](char ch) {
                                             return std::isalnum(static_cast<unsigned char>(ch)) ||
                                                    ch == '-' || ch == '_' || ch == '.';
                                         }),
          "name: must be a non-empty slug of letters, digits, '-', '_' or '.'");

    const FamilyParams* fam = find_family(c.model.family);
    if (!fam) {
        bad.push_back("model.family: unknown family '" + c.model.family + "'; valid families: " +
                      valid_families());
    } else {
        for (const auto& [k, v] : c.model.params) {
            const bool known = std::any_of(fam->defaults.begin(), fam->defaults.end(),
                                           [&](const auto& d) { return d.first == k; });
            check(known, "model.params." + k + ": not a parameter of " + c.model.family);
        }
        check(pos(c.model.mass), "model.mass: must be > 0");
        try {
            (void)c.model.build();
        } catch (const Error& e) {
            bad.push_back(std::string("model.params: ") + e.what());
        }
    }
    check(c.z.finite(), "initial.z: must be finite");
    check(c.delta_z.finite(), "initial.delta_z: must be finite");

    const auto& in = c.integrator;
    check(pos(in.dt), "integrator.dt: must be > 0");
    check(in.n_steps >= 1, "integrator.n_steps: must be >= 1");
    check(in.sample_every >= 1, "integrator.sample_every: must be >= 1");
    check(pos(in.escape_radius), "integrator.escape_radius: must be > 0");
    check(!in.energy_drift_bound || pos(*in.energy_drift_bound), "integrator.energy_drift_bound: must be > 0");

    const auto& ly = c.lyapunov;
    check(!ly.dt || pos(*ly.dt), "lyapunov.dt: must be > 0");
    check(pos(ly.total_time), "lyapunov.total_time: must be > 0");
    check(pos(ly.renorm_interval) && ly.renorm_interval <= ly.total_time,
          "lyapunov.renorm_interval: must be > 0 and no longer than total_time");

    const auto& b = c.bath;
    check(pos(b.density.C), "bath.C: must be > 0");
    check(pos(b.density.omega_max), "bath.omega_max: must be > 0");
    check(b.n_modes >= 2, "bath.n_modes: must be >= 2");
    check(pos(b.T), "bath.T: must be > 0");

    const bool classical = c.engine != Engine::Quantum;
    const bool quant = c.engine != Engine::Classical;
    if (pos(b.density.omega_max)) {
        const double bound = std::numbers::pi / (10.0 * b.density.omega_max);
        if (classical && pos(in.dt)) {
            check(in.sample_interval() <= bound * (1.0 + 1e-12),
                  "bath.sampling: classical drive interval dt*sample_every = " + fmt(in.sample_interval()) +
                      " exceeds pi/(10*omega_max) = " + fmt(bound));
        }
        if (quant && pos(c.quantum.dt)) {
            check(c.quantum.sample_interval() <= bound * (1.0 + 1e-12),
                  "bath.sampling: quantum drive interval dt*sample_every = " + fmt(c.quantum.sample_interval()) +
                      " exceeds pi/(10*omega_max) = " + fmt(bound));
        }
    }

    if (quant) {
        const auto& q = c.quantum;
        try {
            q.grid.validate();
            const double sx = q.sigma_x.value_or(std::sqrt(q.grid.hbar / (2.0 * c.model.mass)));
            const double sy = q.sigma_y.value_or(std::sqrt(q.grid.hbar / (2.0 * c.model.mass)));
            check(sx > 2.0 * q.grid.dx() && sy > 2.0 * q.grid.dy(),
                  "quantum.sigma: packet widths must exceed two grid cells");
            check(sx < q.grid.Lx / 10.0 && sy < q.grid.Ly / 10.0,
                  "quantum.sigma: packet widths must be below a tenth of the box");
            check(std::abs(c.z.qx - q.grid.cx) < 0.5 * q.grid.Lx && std::abs(c.z.qy - q.grid.cy) < 0.5 * q.grid.Ly,
                  "quantum.grid: packet centre lies outside the box");
        } catch (const DomainError& e) {
            bad.push_back(std::string("quantum.grid: ") + e.what());
        }
        check(pos(q.dt), "quantum.dt: must be > 0");
        check(q.n_steps >= 1, "quantum.n_steps: must be >= 1");
        check(q.sample_every >= 1, "quantum.sample_every: must be >= 1");
        check(pos(q.edge_tolerance), "quantum.edge_tolerance: must be > 0");
        check(pos(q.norm_tolerance), "quantum.norm_tolerance: must be > 0");
        check(q.break_fraction > 0.0 && q.break_fraction < 1.0, "quantum.break_fraction: must lie in (0, 1)");
    }

    const auto& f = c.fit;
    check(pos(f.transient_periods), "fit.transient_periods: must be > 0");
    check(f.saturation_fraction > 0.0 && f.saturation_fraction <= 1.0, "fit.saturation_fraction: must lie in (0, 1]");
    check(pos(f.growth_before_fit), "fit.growth_before_fit: must be > 0");
    check(f.ensemble_members >= 0, "fit.ensemble_members: must be >= 0");
    check(std::isfinite(f.ensemble_spacing) && f.ensemble_spacing >= 0.0, "fit.ensemble_spacing: must be >= 0");
    check(f.ensemble_steps >= 0, "fit.ensemble_steps: must be >= 0");
    check(pos(f.shell_time), "fit.shell_time: must be > 0");
    return bad;
}

ExperimentConfig parse_config(const std::string& text, const std::string& source) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError({source + ": parse error at " + line_col(text, e.byte > 0 ? e.byte - 1 : 0) + ": " +
                               e.what()});
    }

    std::vector<std::string> problems;
    ExperimentConfig c;
    Reader top(problems, doc, "");
    if (!doc.is_object()) throw ValidationError({source + ": top level must be a JSON object"});

    top.require("schema_version", c.schema_version);
    top.get("name", c.name);
    top.require("seed", c.seed);
    parse_model(top, c, problems);

    if (const json* j = top.child("initial")) {
        Reader r(problems, *j, "initial");
        r.require("z", c.z);
        r.get("delta_z", c.delta_z);
        r.check_unknown();
    } else {
        problems.push_back("initial: required");
    }
    if (const json* j = top.child("integrator")) {
        Reader r(problems, *j, "integrator");
        r.get("dt", c.integrator.dt);
        r.get("n_steps", c.integrator.n_steps);
        r.get("sample_every", c.integrator.sample_every);
        r.get("escape_radius", c.integrator.escape_radius);
        r.get("energy_drift_bound", c.integrator.energy_drift_bound);
        r.check_unknown();
    }
    if (const json* j = top.child("lyapunov")) {
        Reader r(problems, *j, "lyapunov");
        r.get("enabled", c.lyapunov.enabled);
        r.get("dt", c.lyapunov.dt);
        r.get("total_time", c.lyapunov.total_time);
        r.get("renorm_interval", c.lyapunov.renorm_interval);
        r.check_unknown();
    }
    if (const json* j = top.child("quantum")) {
        Reader r(problems, *j, "quantum");
        auto& g = c.quantum.grid;
        r.get("nx", g.nx);
        r.get("ny", g.ny);
        r.get("Lx", g.Lx);
        r.get("Ly", g.Ly);
        r.get("cx", g.cx);
        r.get("cy", g.cy);
        r.get("hbar", g.hbar);
        r.get("sigma_x", c.quantum.sigma_x);
        r.get("sigma_y", c.quantum.sigma_y);
        r.get("dt", c.quantum.dt);
        r.get("n_steps", c.quantum.n_steps);
        r.get("sample_every", c.quantum.sample_every);
        r.get("edge_tolerance", c.quantum.edge_tolerance);
        r.get("norm_tolerance", c.quantum.norm_tolerance);
        r.get("pair", c.quantum.pair);
        r.get("break_fraction", c.quantum.break_fraction);
        r.check_unknown();
    }
    if (const json* j = top.child("bath")) {
        Reader r(problems, *j, "bath");
        r.get("C", c.bath.density.C);
        r.get("omega_max", c.bath.density.omega_max);
        r.get("n_modes", c.bath.n_modes);
        r.get("T", c.bath.T);
        r.get("oracle", c.bath.oracle);
        r.check_unknown();
    }
    if (const json* j = top.child("fit")) {
        Reader r(problems, *j, "fit");
        r.get("transient_periods", c.fit.transient_periods);
        r.get("saturation_fraction", c.fit.saturation_fraction);
        r.get("growth_before_fit", c.fit.growth_before_fit);
        r.get("ensemble_members", c.fit.ensemble_members);
        r.get("ensemble_spacing", c.fit.ensemble_spacing);
        r.get("ensemble_steps", c.fit.ensemble_steps);
        r.get("shell_time", c.fit.shell_time);
        std::string expect = "none";
        r.get("expect", expect);
        if (expect == "regular") {
            c.fit.expect = Expectation::Regular;
        } else if (expect == "chaotic") {
            c.fit.expect = Expectation::Chaotic;
        } else if (expect != "none") {
            problems.push_back("fit.expect: must be one of none, regular, chaotic");
        }
        r.check_unknown();
    }
    std::string engine = "classical";
    top.get("engine", engine);
    if (auto e = parse_engine(engine)) {
        c.engine = *e;
    } else {
        problems.push_back("engine: must be one of classical, quantum, both");
    }
    if (const json* j = top.child("superposition")) {
        Reader r(problems, *j, "superposition");
        r.get("c1", c.c1);
        r.get("c2", c.c2);
        r.check_unknown();
    }
    top.get("output_dir", c.output_dir);
    top.check_unknown();

    // fields that failed to parse keep their defaults, so the constraint pass still runs
    for (auto& p : validate(c)) {
        if (std::find(problems.begin(), problems.end(), p) == problems.end()) problems.push_back(std::move(p));
    }
    if (!problems.empty()) {
        for (auto& p : problems) p = source + ": " + p;
        throw ValidationError(std::move(problems));
    }
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError({path.string() + ": cannot open file"});
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path.string());
}

std::string to_json(const ExperimentConfig& c) {
    auto pp = [](const models::PhasePoint& z) { return json::array({z.qx, z.qy, z.px, z.py}); };
    auto cx = [](std::complex<double> v) { return json::array({v.real(), v.imag()}); };
    auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };

    json j;
    j["schema_version"] = c.schema_version;
    j["name"] = c.name;
    j["seed"] = c.seed;
    json params = json::object();
    for (const auto& [k, v] : c.model.params) params[k] = v;
    j["model"] = {{"family", c.model.family}, {"params", params}, {"mass", c.model.mass}};
    j["initial"] = {{"z", pp(c.z)}, {"delta_z", pp(c.delta_z)}};
    j["integrator"] = {{"dt", c.integrator.dt},
                       {"n_steps", c.integrator.n_steps},
                       {"sample_every", c.integrator.sample_every},
                       {"escape_radius", c.integrator.escape_radius},
                       {"energy_drift_bound", opt(c.integrator.energy_drift_bound)}};
    j["lyapunov"] = {{"enabled", c.lyapunov.enabled},
                     {"dt", opt(c.lyapunov.dt)},
                     {"total_time", c.lyapunov.total_time},
                     {"renorm_interval", c.lyapunov.renorm_interval}};
    const auto& q = c.quantum;
    j["quantum"] = {{"nx", q.grid.nx},
                    {"ny", q.grid.ny},
                    {"Lx", q.grid.Lx},
                    {"Ly", q.grid.Ly},
                    {"cx", q.grid.cx},
                    {"cy", q.grid.cy},
                    {"hbar", q.grid.hbar},
                    {"sigma_x", opt(q.sigma_x)},
                    {"sigma_y", opt(q.sigma_y)},
                    {"dt", q.dt},
                    {"n_steps", q.n_steps},
                    {"sample_every", q.sample_every},
                    {"edge_tolerance", q.edge_tolerance},
                    {"norm_tolerance", q.norm_tolerance},
                    {"pair", q.pair},
                    {"break_fraction", q.break_fraction}};
    j["bath"] = {{"C", c.bath.density.C},
                 {"omega_max", c.bath.density.omega_max},
                 {"n_modes", c.bath.n_modes},
                 {"T", c.bath.T},
                 {"oracle", c.bath.oracle}};
    const char* expect = c.fit.expect == Expectation::Regular   ? "regular"
                         : c.fit.expect == Expectation::Chaotic ? "chaotic"
                                                                : "none";
    j["fit"] = {{"transient_periods", c.fit.transient_periods},
                {"saturation_fraction", c.fit.saturation_fraction},
                {"growth_before_fit", c.fit.growth_before_fit},
                {"ensemble_members", c.fit.ensemble_members},
                {"ensemble_spacing", c.fit.ensemble_spacing},
                {"ensemble_steps", c.fit.ensemble_steps},
                {"shell_time", c.fit.shell_time},
                {"expect", expect}};
    j["engine"] = std::string(to_string(c.engine));
    j["superposition"] = {{"c1", cx(c.c1)}, {"c2", cx(c.c2)}};
    j["output_dir"] = c.output_dir;
    return j.dump(2) + "\n";
}

}  // namespace decoh::harness
