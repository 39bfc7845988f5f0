// curvesel command-line entry point.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "curvesel/harness.hpp"
#include "serve.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Curve-based 3D selection: scenes, batch simulation, benchmarks and the playground service"};
    app.require_subcommand(1);

    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint16_t> port;

    auto* gen = app.add_subcommand("gen-scene", "Generate a seeded scene and write it as JSON");
    auto* sim = app.add_subcommand("simulate", "Run the trial block; write per-trial CSV and summary JSON");
    auto* bench = app.add_subcommand("bench", "Report ranking latency and discretization error");
    auto* serve = app.add_subcommand("serve", "Start the playground HTTP/WebSocket service");
    for (auto* sub : {gen, sim, bench, serve}) {
        sub->add_option("--config", config, "JSON run config (defaults apply when omitted)");
        sub->add_option("--seed", seed, "Override the config seed");
    }
    gen->add_option("--out", out, "Scene JSON path (default: output.scene_json)");
    sim->add_option("--out", out, "Trial CSV path (default: output.trials_csv)");
    serve->add_option("--port", port, "TCP port (default: config port, 8080)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : curvesel::kExitConfig;
    }

    if (*gen) {
        return curvesel::cmd_gen_scene(config, out, seed, std::cout, std::cerr);
    }
    if (*sim) {
        return curvesel::cmd_simulate(config, out, seed, std::cout, std::cerr);
    }
    if (*bench) {
        return curvesel::cmd_bench(config, seed, std::cout, std::cerr);
    }
    return curvesel::serve::cmd_serve(config, port, seed, std::cout, std::cerr);
}
