// decoh: command-line front end for experiment runs

#include "decoh/harness.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace decoh;
using namespace decoh::harness;

namespace {

enum Exit { kOk = 0, kInvalid = 1, kRuntime = 2 };

struct Common {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::string engine;
};

void add_common(CLI::App* cmd, Common& c, bool need_config = true) {
    auto* opt = cmd->add_option("--config", c.config, "experiment config (JSON)");
    if (need_config) opt->required()->check(CLI::ExistingFile);
    cmd->add_option("--out", c.out, "output root (default: $" + std::string(kOutputRootEnv) + " or ./runs)");
    cmd->add_option("--seed", c.seed, "override the config seed");
    cmd->add_option("--engine", c.engine, "classical | quantum | both")
        ->check(CLI::IsMember({"classical", "quantum", "both"}));
}

ExperimentConfig load_with_overrides(const std::string& path, const Common& c) {
    ExperimentConfig cfg = load_config(path);
    if (c.seed) cfg.seed = *c.seed;
    if (!c.engine.empty()) cfg.engine = *parse_engine(c.engine);
    if (auto bad = validate(cfg); !bad.empty()) throw ValidationError(std::move(bad));
    return cfg;
}

RunOptions options_for(const Common& c, unsigned stages) {
    RunOptions o;
    o.stages = stages;
    if (!c.out.empty()) o.out_root = c.out;
    return o;
}

int report(const RunRecord& r) {
    std::cout << "run directory: " << r.dir.string() << "\n";
    for (const auto& t : r.tolerances) {
        std::cout << (t.pass ? "PASS " : "FAIL ") << t.name << ": " << format_number(t.value) << " (target "
                  << format_number(t.target) << " +/- " << format_number(t.tolerance) << ")\n";
    }
    for (const auto& e : r.errors) std::cerr << "error: " << e << "\n";
    return r.partial() ? kRuntime : kOk;
}

decoherence::DecoherenceSeries read_gamma_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError({path + ": cannot open file"});
    decoherence::DecoherenceSeries s;
    std::string line;
    std::getline(in, line);  // header
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string a, b;
        if (!std::getline(ls, a, ',') || !std::getline(ls, b, ',')) {
            throw ValidationError({path + ": line " + std::to_string(lineno) + ": expected t,gamma"});
        }
        try {
            s.t.push_back(std::stod(a));
            s.gamma.push_back(std::stod(b));
        } catch (const std::exception&) {
            throw ValidationError({path + ": line " + std::to_string(lineno) + ": not a number"});
        }
    }
    return s;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Decoherence of regular and chaotic wavepacket pairs"};
    app.require_subcommand(1);

    Common common;
    struct StageCmd {
        const char* name;
        const char* help;
        unsigned stages;
    };
    const StageCmd stage_cmds[] = {
        {"propagate", "propagate the classical orbit and/or the wavepacket", kPropagate},
        {"lyapunov", "estimate the largest Lyapunov exponent", kLyapunov},
        {"fit", "divergence integral and growth-law fits", kDivergence | kLyapunov},
        {"decohere", "full pipeline: orbits, fits, decoherence exponents and oracle", kAllStages},
    };
    std::vector<std::pair<CLI::App*, unsigned>> runners;
    for (const auto& s : stage_cmds) {
        auto* cmd = app.add_subcommand(s.name, s.help);
        add_common(cmd, common);
        runners.emplace_back(cmd, s.stages);
    }

    auto* validate_cmd = app.add_subcommand("validate-config", "check a config and print its canonical form");
    add_common(validate_cmd, common);

    auto* compare = app.add_subcommand("compare", "regular versus chaotic decoherence comparison");
    std::string reg_cfg, cha_cfg, inject_reg, inject_cha;
    std::optional<double> reg_break, cha_break;
    add_common(compare, common, false);
    compare->add_option("--regular", reg_cfg, "regular config")->check(CLI::ExistingFile);
    compare->add_option("--chaotic", cha_cfg, "chaotic config")->check(CLI::ExistingFile);
    compare->add_option("--inject-regular", inject_reg, "t,gamma CSV (test hook)")->check(CLI::ExistingFile);
    compare->add_option("--inject-chaotic", inject_cha, "t,gamma CSV (test hook)")->check(CLI::ExistingFile);
    compare->add_option("--regular-break", reg_break, "regular Ehrenfest break time for injected series");
    compare->add_option("--chaotic-break", cha_break, "chaotic Ehrenfest break time for injected series");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kInvalid;
    }

    try {
        for (const auto& [cmd, stages] : runners) {
            if (cmd->parsed()) {
                const auto cfg = load_with_overrides(common.config, common);
                return report(run_experiment(cfg, options_for(common, stages)));
            }
        }
        if (validate_cmd->parsed()) {
            std::cout << to_json(load_with_overrides(common.config, common));
            return kOk;
        }
        if (compare->parsed()) {
            ComparisonRecord rec;
            if (!inject_reg.empty() || !inject_cha.empty()) {
                if (inject_reg.empty() || inject_cha.empty()) {
                    throw ValidationError({"--inject-regular and --inject-chaotic go together"});
                }
                const fs::path root = common.out.empty() ? default_output_root() : fs::path(common.out);
                rec = compare_injected(read_gamma_csv(inject_reg), read_gamma_csv(inject_cha), reg_break, cha_break,
                                       root / "injected-compare");
            } else {
                if (reg_cfg.empty() || cha_cfg.empty()) throw ValidationError({"--regular and --chaotic are required"});
                rec = compare_command(load_with_overrides(reg_cfg, common), load_with_overrides(cha_cfg, common),
                                      options_for(common, kAllStages));
            }
            std::cout << "comparison directory: " << rec.dir.string() << "\n" << rec.report.dump(2) << "\n";
            const bool partial = (rec.regular && rec.regular->partial()) || (rec.chaotic && rec.chaotic->partial());
            return partial ? kRuntime : kOk;
        }
    } catch (const ValidationError& e) {
        std::cerr << e.what() << "\n";
        return kInvalid;
    } catch (const std::exception& e) {
        std::cerr << "runtime failure: " << e.what() << "\n";
        return kRuntime;
    }
    return kOk;
}
