#pragma once
/**
 * @file harness.hpp
 * @brief Implementations of the `gen-scene`, `simulate` and `bench`
 *        subcommands, callable in-process (the CLI is a thin wrapper).
 *
 * Exit codes are a stable contract: 0 success, 1 I/O failure, 2 config
 * error, 3 infeasible scene, 4 port busy.
 */

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>

#include "curvesel/bench.hpp"
#include "curvesel/io.hpp"
#include "curvesel/scene.hpp"
#include "curvesel/simulate.hpp"

namespace curvesel {

enum ExitCode : int { kExitOk = 0, kExitIo = 1, kExitConfig = 2, kExitInfeasible = 3, kExitPortBusy = 4 };

/// --seed replaces both the scene seed and the noise seed.
inline void apply_seed_override(RunConfig& rc, std::optional<std::uint64_t> seed) {
    if (seed) {
        rc.block.scene.seed = *seed;
        rc.block.noise.seed = *seed;
    }
}

inline bool write_text(const std::string& path, const std::string& text, std::ostream& err) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << text;
    out.flush();
    if (!out) {
        err << "error: cannot write " << path << '\n';
        return false;
    }
    return true;
}

inline int cmd_gen_scene(const std::string& config_path, const std::string& out_path,
                         std::optional<std::uint64_t> seed, std::ostream& out, std::ostream& err) {
    try {
        RunConfig rc = load_run_config(config_path);
        apply_seed_override(rc, seed);
        const std::string path = out_path.empty() ? rc.output.scene_json : out_path;
        const Scene scene = generate_scene(rc.block.scene);
        if (!write_text(path, to_json(scene).dump(2) + "\n", err)) {
            return kExitIo;
        }
        out << "wrote " << scene.objects.size() << " objects (target " << scene.target_id << ") to " << path << '\n';
        return kExitOk;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const InfeasibleSceneError& e) {
        err << "infeasible scene: " << e.what() << '\n';
        return kExitInfeasible;
    }
}

inline void print_summary(std::ostream& out, const std::vector<TechniqueSummary>& summary) {
    const auto opt = [](const std::optional<double>& v) {
        std::ostringstream s;
        if (v) {
            s << std::fixed << std::setprecision(3) << *v;
        } else {
            s << "-";
        }
        return s.str();
    };
    out << std::left << std::setw(22) << "technique" << std::right << std::setw(8) << "trials" << std::setw(10)
        << "capture" << std::setw(10) << "error" << std::setw(10) << "rank" << std::setw(12) << "occl.capt"
        << std::setw(12) << "mean d_min" << '\n';
    for (const auto& s : summary) {
        out << std::left << std::setw(22) << to_string(s.technique) << std::right << std::setw(8) << s.trials
            << std::setw(10) << opt(s.capture_rate) << std::setw(10) << opt(s.error_rate) << std::setw(10)
            << opt(s.mean_target_rank) << std::setw(12) << opt(s.occluded_capture_rate) << std::setw(12)
            << opt(s.mean_d_min) << '\n';
    }
}

inline int cmd_simulate(const std::string& config_path, const std::string& out_csv, std::optional<std::uint64_t> seed,
                        std::ostream& out, std::ostream& err) {
    try {
        RunConfig rc = load_run_config(config_path);
        apply_seed_override(rc, seed);
        if (!out_csv.empty()) {
            rc.output.trials_csv = out_csv;
        }
        const BlockResult result = run_block(rc.block);
        std::ostringstream csv;
        write_trials_csv(csv, result.trials);
        if (!write_text(rc.output.trials_csv, csv.str(), err) ||
            !write_text(rc.summary_path(), summary_to_json(result.summary).dump(2) + "\n", err)) {
            return kExitIo;
        }
        print_summary(out, result.summary);
        out << result.trials.size() << " trials -> " << rc.output.trials_csv << ", summary -> " << rc.summary_path()
            << '\n';
        return kExitOk;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const InfeasibleSceneError& e) {
        err << "infeasible scene: " << e.what() << '\n';
        return kExitInfeasible;
    }
}

inline int cmd_bench(const std::string& config_path, std::optional<std::uint64_t> seed, std::ostream& out,
                     std::ostream& err) {
    try {
        RunConfig rc = load_run_config(config_path);
        apply_seed_override(rc, seed);
        BenchOptions opt;
        opt.seed = rc.block.scene.seed;
        const BenchReport report = run_bench(opt);

        out << "rank_objects latency (n=20, k=4) [wall clock]\n";
        for (const auto& l : report.latency) {
            out << "  objects=" << std::setw(6) << l.objects << "  reps=" << std::setw(5) << l.repetitions
                << "  median=" << std::fixed << std::setprecision(2) << l.median_us << " us  p99=" << l.p99_us
                << " us\n";
        }
        out << "curve-to-polyline deviation over " << opt.curves << " seeded curves\n";
        const DeviationRow* prev = nullptr;
        for (const auto& row : report.deviation) {
            out << "  n=" << std::setw(3) << row.segments << "  max_dev=" << std::scientific << std::setprecision(4)
                << row.max_deviation << "  max_bound=" << row.max_bound << "  worst dev/bound=" << std::fixed
                << std::setprecision(4) << row.worst_bound_usage << (row.within_bound ? "  ok" : "  EXCEEDED");
            if (prev != nullptr && row.max_deviation > 0.0) {
                out << "  shrink=" << std::setprecision(3) << prev->max_deviation / row.max_deviation;
            }
            out << '\n';
            prev = &row;
        }
        out.unsetf(std::ios::floatfield);
        return kExitOk;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    }
}

}  // namespace curvesel
