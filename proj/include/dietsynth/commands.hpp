#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "dietsynth/scoring.hpp"

namespace dietsynth {

inline constexpr std::string_view kToolVersion = "0.1.0";

/// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUnexpected = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitData = 3;

struct GenerateOptions {
    std::filesystem::path config;
    std::filesystem::path manifest;
    uint64_t seed = 0;
    int weeks = 4;
    std::filesystem::path out_dir;
};

/// Writes <out_dir>/dataset.jsonl and <out_dir>/run_manifest.json.
void cmd_generate(const GenerateOptions& options);

struct AnalyzeOptions {
    std::filesystem::path dataset;
    std::optional<std::filesystem::path> mapping; // built-in default when absent
    std::filesystem::path out_csv;
};

void cmd_analyze(const AnalyzeOptions& options);

struct ScoreOptions {
    std::filesystem::path intakes;
    std::optional<std::filesystem::path> ranges; // built-in default when absent
    NormalizeMode norm = NormalizeMode::batch();
    double threshold = kDefaultThreshold;
    std::filesystem::path out_scores;
    std::filesystem::path out_report;
};

/// Scores every diet (Variable ones included) and evaluates the binary
/// report over the non-Variable rows, at the fixed threshold and at the
/// accuracy-best threshold.
void cmd_score_evaluate(const ScoreOptions& options);

struct PlotDataOptions {
    std::filesystem::path scores;
    std::filesystem::path out_csv;
};

/// Exports (diet index, healthy score, group) rows ordered by profile group
/// then subject, ready for a scatter plot.
void cmd_plot_data(const PlotDataOptions& options);

/// Full argv-level entry point; maps errors to exit codes.
int run_cli(const std::vector<std::string>& args);

} // namespace dietsynth
