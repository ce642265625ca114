#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "dietsynth/analysis.hpp"
#include "dietsynth/scoring.hpp"
#include "dietsynth/synthesis.hpp"

namespace dietsynth {

/// FNV-1a over the raw bytes of a file, as a 16-digit hex string.
uint64_t hash_file(const std::filesystem::path& path);
std::string to_hex(uint64_t value);

// One JSON object per meal record, labelled with the item's taxonomy node and
// the week's ground truth so downstream stages need no item pool.
void write_dataset_jsonl(const Dataset& dataset, const FoodPool& pool,
                         const std::filesystem::path& path);

/// Throws DataError on malformed lines or labels.
std::vector<LabeledWeek> read_dataset_jsonl(const std::filesystem::path& path);

struct IntakeRow {
    std::string subject_id;
    std::string profile_id;
    int week = 0;
    IntakeVector intake;
    ProfileType ground_truth = ProfileType::Healthy;
};

void write_intake_csv(std::span<const IntakeRow> rows, const std::filesystem::path& path);
std::vector<IntakeRow> read_intake_csv(const std::filesystem::path& path);

void write_scores_csv(std::span<const ScoreRecord> records, const std::filesystem::path& path);
std::vector<ScoreRecord> read_scores_csv(const std::filesystem::path& path);

} // namespace dietsynth
