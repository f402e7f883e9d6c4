// Command-line driver: runs one experiment and writes CSV/SVG outputs plus a manifest.

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <hetbel/config.hpp>
#include <hetbel/experiments.hpp>
#include <hetbel/manifest.hpp>

namespace fs = std::filesystem;

namespace {

std::string json_escape(const std::string& s) {
    std::string o;
    for (char c : s) {
        if (c == '"' || c == '\\') {
            o += '\\';
            o += c;
        } else if (c == '\n') {
            o += "\\n";
        } else {
            o += c;
        }
    }
    return o;
}

int fail(const char* kind, const std::string& msg, int code) {
    std::cerr << "{\"error\":\"" << kind << "\",\"message\":\"" << json_escape(msg) << "\"}\n";
    return code;
}

void write_file(const fs::path& p, const std::string& content) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + p.string() + "'");
    out << content;
    if (!out) throw std::runtime_error("write failed for '" + p.string() + "'");
}

struct Options {
    std::string experiment;
    std::string config;
    std::string out;
    std::string manifest;
    std::uint64_t seed = 0;
    std::size_t paths = 0;
    unsigned threads = 1;
    std::vector<std::string> sets;
    std::string zeta;
    bool quiet = false;
};

int run(const Options& o, const CLI::App& cmd) {
    hetbel::ExperimentConfig cfg;
    hetbel::RunManifest reference;
    const bool rerun = !o.manifest.empty();
    if (rerun) {
        reference = hetbel::RunManifest::load(o.manifest);
        cfg = hetbel::parse_config(reference.config);
    }
    if (!o.config.empty()) cfg = hetbel::load_config(o.config, cfg);
    if (cmd.count("--experiment")) cfg.experiment = hetbel::parse_experiment(o.experiment);
    if (cmd.count("--seed")) cfg.grid.seed = o.seed;
    if (cmd.count("--paths")) cfg.grid.n_paths = o.paths;
    for (const auto& kv : o.sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw hetbel::ConfigError("--set expects key=value, got '" + kv + "'");
        hetbel::set_config_value(cfg, hetbel::detail::trim(kv.substr(0, eq)), hetbel::detail::trim(kv.substr(eq + 1)));
    }
    if (cmd.count("--zeta")) hetbel::set_config_value(cfg, "sweep.zeta", o.zeta);
    if (cmd.count("--out")) cfg.out = o.out;

    const fs::path dir(cfg.out);
    fs::create_directories(dir);
    const auto t0 = std::chrono::steady_clock::now();
    const auto result = hetbel::run_experiment(cfg, o.threads);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    hetbel::RunManifest m;
    m.experiment = hetbel::experiment_name(cfg.experiment);
    m.seed = cfg.grid.seed;
    m.config = hetbel::serialize_config(cfg);
    m.runtime_seconds = secs;
    for (const auto& [name, content] : result.files) {
        write_file(dir / name, content);
        m.checksums.emplace_back(name, hetbel::sha256_hex(content));
    }
    write_file(dir / "manifest.txt", m.str());
    if (!o.quiet) std::cout << result.summary;

    if (rerun) {
        std::size_t mismatches = 0;
        for (const auto& [name, hash] : reference.checksums) {
            std::string got;
            for (const auto& [n, h] : m.checksums)
                if (n == name) got = h;
            if (got != hash) {
                ++mismatches;
                std::cerr << "mismatch: " << name << "\n";
            }
        }
        if (mismatches > 0 || reference.checksums.size() != m.checksums.size())
            return fail("verify", std::to_string(mismatches) + " output(s) differ from the manifest", 3);
        if (!o.quiet) std::cout << "verified " << m.checksums.size() << " output(s) against " << o.manifest << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Heterogeneous-belief economy experiments"};
    app.set_version_flag("--version", std::string(hetbel::kVersion));
    app.require_subcommand(1);
    Options o;
    auto* cmd = app.add_subcommand("run", "run one experiment");
    cmd->add_option("--experiment", o.experiment,
                    "paths | welfare-sweep | double-loss | strategist | survival | two-state | critical-zeta");
    cmd->add_option("--config", o.config, "config file (key = value lines)");
    cmd->add_option("--out", o.out, "output directory");
    cmd->add_option("--seed", o.seed, "master seed");
    cmd->add_option("--paths", o.paths, "number of Monte Carlo paths");
    cmd->add_option("--threads", o.threads, "worker threads (results do not depend on it)")->check(CLI::PositiveNumber);
    cmd->add_option("--set", o.sets, "override key=value (repeatable)");
    cmd->add_option("--zeta", o.zeta, "comma-separated bias list");
    cmd->add_option("--manifest", o.manifest, "rerun from a manifest and verify checksums");
    cmd->add_flag("--quiet", o.quiet, "suppress the summary");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return fail("usage", e.what(), 2);
    }
    try {
        return run(o, *cmd);
    } catch (const hetbel::ConfigError& e) {
        return fail("config", e.what(), 2);
    } catch (const hetbel::StabilityError& e) {
        return fail("stability", e.what(), 2);
    } catch (const hetbel::ModelError& e) {
        return fail("model", e.what(), 2);
    } catch (const hetbel::UnsupportedModel& e) {
        return fail("unsupported", e.what(), 2);
    } catch (const std::exception& e) {
        return fail("runtime", e.what(), 1);
    }
}
