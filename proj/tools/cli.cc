#include "cli.h"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "json.hpp"
#include "pchsh/extraction.h"
#include "pchsh/game.h"
#include "pchsh/report_io.h"
#include "pchsh/strategy.h"
#include "pchsh/strategy_io.h"
#include "pchsh/verifier.h"

namespace pchsh::cli {

namespace {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ValidationFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
    std::vector<std::size_t> n;
    std::string noise = "none";
    std::vector<double> noise_param;
    std::string strategy_path;
    std::uint64_t rounds = 0;
    std::optional<std::uint64_t> seed;
    unsigned workers = 1;
    std::string coverage = "auto";
    std::size_t samples = kDefaultConditionSamples;
    std::size_t distance_samples = kDefaultDistanceSamples;
    std::string out_path;
    std::string format = "csv";
};

std::string fixed12(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12f", x);
    return buf;
}

void check_n(std::size_t n, std::size_t max_n, const char *what) {
    if (n < 2 || n % 2 != 0) {
        throw ConfigError("--n must be even and at least 2, got " + std::to_string(n));
    }
    if (n > max_n) {
        throw ConfigError(std::string(what) + " supports n <= " + std::to_string(max_n));
    }
}

std::size_t single_n(const ExperimentConfig &cfg) {
    if (cfg.n.size() != 1) {
        throw ConfigError("exactly one --n value is required");
    }
    return cfg.n.front();
}

NoiseSpec noise_spec(const ExperimentConfig &cfg, double param) {
    NoiseSpec spec;
    try {
        spec.model = parse_noise_model(cfg.noise);
    } catch (const std::invalid_argument &e) {
        throw ConfigError(e.what());
    }
    spec.param = param;
    if (!std::isfinite(param)) {
        throw ConfigError("--noise-param must be finite");
    }
    if (spec.model == NoiseModel::none && param != 0.0) {
        throw ConfigError("--noise none takes no --noise-param");
    }
    if (spec.model == NoiseModel::partial_entanglement && (!(param > 0.0) || param > std::numbers::pi / 4 + 1e-15)) {
        throw ConfigError("partial-entanglement angle must lie in (0, pi/4]");
    }
    return spec;
}

double single_param(const ExperimentConfig &cfg) {
    if (cfg.noise_param.size() > 1) {
        throw ConfigError("exactly one --noise-param value is allowed here");
    }
    return cfg.noise_param.empty() ? 0.0 : cfg.noise_param.front();
}

std::uint64_t require_seed(const ExperimentConfig &cfg) {
    if (!cfg.seed) {
        throw ConfigError("a seed is required (--seed or the SEED environment variable)");
    }
    return *cfg.seed;
}

// Loads or generates the strategy, then runs validation.
Strategy obtain_strategy(const ExperimentConfig &cfg, std::size_t max_n, const char *what) {
    Strategy s;
    if (!cfg.strategy_path.empty()) {
        if (!std::filesystem::exists(cfg.strategy_path)) {
            throw ConfigError("strategy file not found: " + cfg.strategy_path);
        }
        try {
            s = load_strategy(cfg.strategy_path);
        } catch (const std::invalid_argument &e) {
            throw ValidationFailure(e.what());
        }
        check_n(s.n, max_n, what);
    } else {
        std::size_t n = single_n(cfg);
        check_n(n, max_n, what);
        s = noisy_strategy(n, noise_spec(cfg, single_param(cfg)));
    }
    ValidationReport v = validate(s);
    if (!v.passed()) {
        std::ostringstream msg;
        msg << "strategy failed validation (hermiticity " << v.hermiticity << ", unitarity " << v.unitarity
            << ", commutation " << v.commutation << ", normalization " << v.normalization << ")";
        for (const auto &p : v.problems) {
            msg << "; " << p;
        }
        throw ValidationFailure(msg.str());
    }
    return s;
}

Coverage coverage_for(const ExperimentConfig &cfg, std::size_t n) {
    if (cfg.coverage == "exhaustive") {
        return {CoverageMode::exhaustive, cfg.samples, cfg.seed.value_or(0)};
    }
    if (cfg.coverage == "sampled" || (cfg.coverage == "auto" && n > kExhaustiveMaxN)) {
        return {CoverageMode::sampled, cfg.samples, require_seed(cfg)};
    }
    return {CoverageMode::exhaustive, cfg.samples, cfg.seed.value_or(0)};
}

// Writes to --out when given, otherwise to `out`.
void emit(const ExperimentConfig &cfg, std::ostream &out, const std::string &text) {
    if (cfg.out_path.empty()) {
        out << text;
        return;
    }
    std::ofstream file(cfg.out_path);
    if (!file) {
        throw ConfigError("cannot open output file " + cfg.out_path);
    }
    file << text;
}

int cmd_generate(const ExperimentConfig &cfg, std::ostream &out) {
    std::size_t n = single_n(cfg);
    check_n(n, kMaxStrategyN, "generate");
    emit(cfg, out, strategy_to_json(noisy_strategy(n, noise_spec(cfg, single_param(cfg)))));
    return kOk;
}

int cmd_value(const ExperimentConfig &cfg, std::ostream &out) {
    Strategy s = obtain_strategy(cfg, kMaxExactN, "value");
    GameValue v = exact_value(s);
    if (cfg.format == "text") {
        nlohmann::ordered_json doc;
        doc["n"] = s.n;
        doc["mode"] = "exact";
        doc["value"] = fixed12(v.value);
        doc["win_probability"] = fixed12(v.win_probability);
        emit(cfg, out, doc.dump(2) + "\n");
    } else {
        emit(cfg, out, fixed12(v.value) + "\n");
    }
    return kOk;
}

int cmd_simulate(const ExperimentConfig &cfg, std::ostream &out) {
    if (cfg.rounds < 1) {
        throw ConfigError("--rounds must be at least 1");
    }
    if (cfg.workers < 1) {
        throw ConfigError("--workers must be at least 1");
    }
    std::uint64_t seed = require_seed(cfg);
    Strategy s = obtain_strategy(cfg, kMaxStrategyN, "simulate");
    GameValue v = referee_simulate(s, cfg.rounds, seed, cfg.workers);
    if (cfg.format == "text") {
        nlohmann::ordered_json doc;
        doc["n"] = s.n;
        doc["mode"] = "sampled";
        doc["estimate"] = fixed12(v.value);
        doc["stderr"] = fixed12(v.standard_error);
        doc["win_rate"] = fixed12(v.win_probability);
        doc["rounds"] = v.rounds;
        doc["seed"] = v.seed;
        doc["workers"] = v.workers;
        emit(cfg, out, doc.dump(2) + "\n");
    } else {
        emit(cfg, out,
             "estimate,stderr,win_rate,rounds,seed,workers\n" + fixed12(v.value) + "," + fixed12(v.standard_error) +
                 "," + fixed12(v.win_probability) + "," + std::to_string(v.rounds) + "," + std::to_string(v.seed) +
                 "," + std::to_string(v.workers) + "\n");
    }
    return kOk;
}

int cmd_certify(const ExperimentConfig &cfg, std::ostream &out) {
    Strategy s = obtain_strategy(cfg, kMaxCertifyN, "certify");
    NoiseSpec noise = cfg.strategy_path.empty() ? noise_spec(cfg, single_param(cfg)) : NoiseSpec{};
    CertifyOptions options;
    options.coverage = coverage_for(cfg, s.n);
    options.distance_samples = cfg.distance_samples;
    SelfTestReport report = certify(s, options);
    if (cfg.format == "text") {
        emit(cfg, out, report_to_json(report));
    } else {
        emit(cfg, out, sweep_csv_header() + "\n" + sweep_csv_row(report, noise) + "\n");
    }
    return report.all_passed() ? kOk : kBoundViolation;
}

int cmd_sweep(const ExperimentConfig &cfg, std::ostream &out) {
    if (!cfg.strategy_path.empty()) {
        throw ConfigError("sweep generates its own strategies; --strategy is not accepted");
    }
    for (std::size_t n : cfg.n) {
        check_n(n, kMaxCertifyN, "sweep");
    }
    std::vector<NoiseSpec> params;
    if (cfg.noise == "none" && cfg.noise_param.empty()) {
        params.push_back(noise_spec(cfg, 0.0));
    } else {
        for (double p : cfg.noise_param) {
            params.push_back(noise_spec(cfg, p));
        }
    }

    bool violation = false;
    std::string csv = sweep_csv_header() + "\n";
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (std::size_t n : cfg.n) {
        for (const NoiseSpec &noise : params) {
            CertifyOptions options;
            options.coverage = coverage_for(cfg, n);
            options.distance_samples = cfg.distance_samples;
            SelfTestReport report = certify(noisy_strategy(n, noise), options);
            violation = violation || !report.all_passed();
            csv += sweep_csv_row(report, noise) + "\n";
            rows.push_back(nlohmann::ordered_json::parse(report_to_json(report)));
            rows.back()["model"] = to_string(noise.model);
            rows.back()["param"] = noise.param;
        }
    }
    emit(cfg, out, cfg.format == "text" ? rows.dump(2) + "\n" : csv);
    return violation ? kBoundViolation : kOk;
}

int cmd_logset(const ExperimentConfig &cfg, std::ostream &out) {
    std::size_t n = single_n(cfg);
    check_n(n, 2 * BitString::kMaxLength, "logset");
    std::string text;
    for (const BitString &q : log_question_set(n)) {
        text += q.to_string() + "\n";
    }
    emit(cfg, out, text);
    return kOk;
}

}  // namespace

int run(int argc, char **argv, std::ostream &out, std::ostream &err) {
    CLI::App app{"Parallel CHSH self-testing simulator and verifier"};
    app.require_subcommand(1);
    ExperimentConfig cfg;
    std::uint64_t seed_flag = 0;

    auto add_strategy_flags = [&](CLI::App *sub, bool multi_n) {
        if (multi_n) {
            sub->add_option("--n", cfg.n, "tested qubit counts (even)");
            sub->add_option("--noise-param", cfg.noise_param, "noise parameters");
        } else {
            sub->add_option("--n", cfg.n, "number of tested qubits (even)")->expected(1);
            sub->add_option("--noise-param", cfg.noise_param, "noise parameter")->expected(1);
        }
        sub->add_option("--noise", cfg.noise, "none | bob-rotation | partial-entanglement")
            ->check(CLI::IsMember({"none", "bob-rotation", "partial-entanglement"}));
        sub->add_option("--out", cfg.out_path, "output path (default stdout)");
        sub->add_option("--format", cfg.format, "csv | text")->check(CLI::IsMember({"csv", "text"}));
    };
    auto add_seed = [&](CLI::App *sub) { sub->add_option("--seed", seed_flag, "RNG seed (overrides SEED)"); };
    auto add_coverage = [&](CLI::App *sub) {
        sub->add_option("--coverage", cfg.coverage, "exhaustive | sampled (default: exhaustive iff n <= 6)")
            ->check(CLI::IsMember({"auto", "exhaustive", "sampled"}));
        sub->add_option("--samples", cfg.samples, "(s, t) samples in sampled mode")->check(CLI::PositiveNumber);
        sub->add_option("--distance-samples", cfg.distance_samples, "(p, q) samples in sampled mode")
            ->check(CLI::PositiveNumber);
    };

    auto *generate = app.add_subcommand("generate", "write a generated strategy file");
    add_strategy_flags(generate, false);

    auto *value = app.add_subcommand("value", "exact game value");
    add_strategy_flags(value, false);
    value->add_option("--strategy", cfg.strategy_path, "strategy file");

    auto *simulate = app.add_subcommand("simulate", "Monte Carlo referee");
    add_strategy_flags(simulate, false);
    simulate->add_option("--strategy", cfg.strategy_path, "strategy file");
    simulate->add_option("--rounds", cfg.rounds, "number of rounds")->required();
    simulate->add_option("--workers", cfg.workers, "worker threads");
    add_seed(simulate);

    auto *certify_cmd = app.add_subcommand("certify", "self-test report");
    add_strategy_flags(certify_cmd, false);
    certify_cmd->add_option("--strategy", cfg.strategy_path, "strategy file");
    add_coverage(certify_cmd);
    add_seed(certify_cmd);

    auto *sweep = app.add_subcommand("sweep", "certify over a grid of n and noise parameters");
    add_strategy_flags(sweep, true);
    add_coverage(sweep);
    add_seed(sweep);

    auto *logset = app.add_subcommand("logset", "logarithmic question set");
    logset->add_option("--n", cfg.n, "number of tested qubits (even)")->expected(1)->required();
    logset->add_option("--out", cfg.out_path, "output path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError &e) {
        app.exit(e, out, err);
        return kConfigError;
    }

    try {
        bool seed_given = false;
        for (auto *sub : {simulate, certify_cmd, sweep}) {
            if (sub->parsed() && sub->count("--seed") > 0) {
                seed_given = true;
            }
        }
        if (seed_given) {
            cfg.seed = seed_flag;
        } else if (const char *env = std::getenv("SEED"); env != nullptr && *env != '\0') {
            char *end = nullptr;
            unsigned long long parsed = std::strtoull(env, &end, 10);
            if (end == nullptr || *end != '\0') {
                throw ConfigError("SEED must be a non-negative integer");
            }
            cfg.seed = parsed;
        }

        if (generate->parsed()) return cmd_generate(cfg, out);
        if (value->parsed()) return cmd_value(cfg, out);
        if (simulate->parsed()) return cmd_simulate(cfg, out);
        if (certify_cmd->parsed()) return cmd_certify(cfg, out);
        if (sweep->parsed()) return cmd_sweep(cfg, out);
        if (logset->parsed()) return cmd_logset(cfg, out);
        throw ConfigError("no command given");
    } catch (const ConfigError &e) {
        err << "error: " << e.what() << "\n";
        return kConfigError;
    } catch (const ValidationFailure &e) {
        err << "error: " << e.what() << "\n";
        return kValidationError;
    } catch (const JunkExtractionError &e) {
        err << "error: " << e.what() << "\n";
        return kBoundViolation;
    } catch (const std::invalid_argument &e) {
        err << "error: " << e.what() << "\n";
        return kConfigError;
    }
}

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
    std::vector<std::string> storage;
    storage.reserve(args.size() + 1);
    storage.push_back("pchsh");
    storage.insert(storage.end(), args.begin(), args.end());
    std::vector<char *> argv;
    for (auto &s : storage) {
        argv.push_back(s.data());
    }
    return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace pchsh::cli
