#pragma once

#include <optional>
#include <string>

#include "qwalk/config.hpp"

namespace qwalk::cli {

inline constexpr const char* kVersion = "0.1.0";

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitFailure = 3;
inline constexpr int kExitPartial = 4;

struct RunOptions {
    std::string out_dir = ".";
    bool plots = true;
    int threads = 0;  // 0 -> hardware concurrency
    std::optional<std::uint64_t> seed_override;
};

// Each command validates its config, writes its files under out_dir and
// returns an exit code.  ConfigError escapes (the caller maps it to exit
// code 2); detector and training failures inside a command are reported in
// the output files and through kExitFailure / kExitPartial.

// distribution.csv, diagnostics.csv, run_info.json, optional SVG plots.
int cmd_simulate(const ExperimentConfig& config, const RunOptions& options);

// sweep.csv, estimates.csv, run_info.json, optional SVG plots.
int cmd_sweep(const ExperimentConfig& config, const RunOptions& options);

// subaction train: model file + train_report.csv
// subaction scan: confusion.csv + estimate.csv (+ SVG)
// subaction samplesize: samplesize.csv
// subaction regions: regions.csv
int cmd_ml(const ExperimentConfig& config, const RunOptions& options,
           const std::string& subaction);

// criticals.csv, exponents.csv, run_info.json, optional SVG plot.
int cmd_scaling(const ExperimentConfig& config, const RunOptions& options);

}  // namespace qwalk::cli
