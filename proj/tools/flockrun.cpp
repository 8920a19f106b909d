// Scenario runner: flockrun run <preset|config.json> [flags], list-presets, validate.
#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "tgflock/error.hpp"
#include "tgflock/experiment.hpp"
#include "tgflock/io.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitModel = 3;

tgflock::Json load_source(const std::string& source) {
    if (tgflock::is_preset(source)) return tgflock::preset_config(source);
    if (!std::filesystem::exists(source)) {
        throw tgflock::Error(tgflock::ErrorKind::ConfigInvalid, "'" + source + "' is neither a preset nor a file");
    }
    tgflock::Json file;
    try {
        file = tgflock::Json::parse(tgflock::read_text_file(source));
    } catch (const tgflock::Json::exception& e) {
        throw tgflock::Error(tgflock::ErrorKind::ParseError, source + ": " + e.what());
    }
    // A config may name a preset to inherit from; file fields win.
    tgflock::Json base = tgflock::Json::object();
    if (file.is_object() && file.contains("preset")) {
        base = tgflock::preset_config(file.at("preset").get<std::string>());
        file.erase("preset");
    }
    tgflock::merge_config(base, file);
    return base;
}

int exit_code_for(const tgflock::Error& e) {
    switch (e.kind()) {
        case tgflock::ErrorKind::ConfigInvalid:
        case tgflock::ErrorKind::ParseError:
        case tgflock::ErrorKind::UnknownKind:
        case tgflock::ErrorKind::IoFailure:
            return kExitConfig;
        default:
            return kExitModel;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Flocking and consensus scenario runner"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "Run a preset or a JSON config");
    std::string source;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    std::optional<double> dt;
    std::optional<double> horizon;
    std::vector<std::string> params;
    run->add_option("source", source, "Preset name or config file")->required();
    run->add_option("--seed", seed, "Override the seed");
    run->add_option("--out", out_dir, "Output directory");
    run->add_option("--dt", dt, "Time step");
    run->add_option("--T", horizon, "Horizon");
    run->add_option("--param", params, "Dotted override key=value (repeatable)");

    auto* list = app.add_subcommand("list-presets", "List built-in presets");

    auto* validate = app.add_subcommand("validate", "Check a config without running it");
    std::string validate_source;
    validate->add_option("config", validate_source, "Preset name or config file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (list->parsed()) {
            for (const auto& p : tgflock::list_presets()) {
                std::cout << p.name << "\t" << p.description << "\t[" << p.anchor << "]\n";
            }
            return 0;
        }
        if (validate->parsed()) {
            const auto cfg = tgflock::ScenarioConfig::from_json(load_source(validate_source));
            std::cout << "ok: " << cfg.name << " (" << cfg.experiment << ")\n";
            return 0;
        }

        tgflock::Json j = load_source(source);
        if (seed) j["seed"] = *seed;
        if (out_dir) j["out_dir"] = *out_dir;
        if (dt) j["dt"] = *dt;
        if (horizon) j["horizon"] = *horizon;
        for (const auto& kv : params) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos) {
                throw tgflock::Error(tgflock::ErrorKind::ConfigInvalid, "--param expects key=value, got '" + kv + "'");
            }
            tgflock::apply_override(j, kv.substr(0, eq), kv.substr(eq + 1));
        }
        const auto cfg = tgflock::ScenarioConfig::from_json(j);
        const auto manifest = tgflock::run_scenario(cfg);
        std::cout << manifest.run_dir.string() << "\n";
        for (const auto& f : manifest.files) std::cout << "  " << f.path << "  " << f.sha256 << "\n";
        return 0;
    } catch (const tgflock::Error& e) {
        std::cerr << "error: " << e.what();
        if (e.time()) std::cerr << " (t = " << *e.time() << ")";
        std::cerr << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitModel;
    }
}
