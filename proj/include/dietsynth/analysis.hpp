#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "dietsynth/synthesis.hpp"
#include "dietsynth/taxonomy.hpp"

namespace dietsynth {

inline constexpr int kIntakeGroups = 9;

/// Fixed group order of the intake vector: three daily averages, six weekly
/// counts.
extern const std::array<std::string_view, kIntakeGroups> kGroupNames;

struct RecordLabels {
    int level = 0;
    std::string category;
    std::string subcategory;
};

struct LabeledRecord {
    MealRecord record;
    RecordLabels labels;
};

struct LabeledWeek {
    std::string subject_id;
    std::string profile_id;
    int week = 0;
    ProfileType ground_truth = ProfileType::Healthy;
    std::vector<LabeledRecord> records;
};

// ---------------------------------------------------------------------------
// Recognition boundary
// ---------------------------------------------------------------------------

/// Maps a record's ground-truth labels to the labels the analysis sees. The
/// default provider is the identity (stands in for a recognition model over
/// the original images); tests substitute noisy providers here.
using LabelProvider = std::function<RecordLabels(const MealRecord&, const RecordLabels&)>;

LabelProvider pass_through_provider();

RecordLabels recognize(const MealRecord& record, const RecordLabels& ground_truth,
                       const LabelProvider& provider);

/// Labels every record of a generated dataset through the provider.
/// Throws DataError when an item id is absent from the pool.
std::vector<LabeledWeek> label_dataset(const Dataset& dataset, const FoodPool& pool,
                                       const LabelProvider& provider = pass_through_provider());

// ---------------------------------------------------------------------------
// Group mapping and aggregation
// ---------------------------------------------------------------------------

/// Membership rule for one intake group: a record matches when its level,
/// category, or subcategory appears in the respective list. A record may
/// match several groups (a level-2 meat counts as meat and as level-2).
struct GroupRule {
    std::string name;
    FrequencyUnit unit = FrequencyUnit::Weekly;
    std::vector<int> levels;
    std::vector<std::string> categories;
    std::vector<std::string> subcategories;

    bool matches(const RecordLabels& labels) const;
};

struct GroupMapping {
    std::array<GroupRule, kIntakeGroups> groups;

    static const GroupMapping& standard();
    static GroupMapping from_json(const nlohmann::json& doc);
    static GroupMapping load_file(const std::filesystem::path& path);
};

/// 9-entry frequency summary of one weekly log; entries 0-2 are per-day
/// averages (weekly count / 7), entries 3-8 raw weekly counts.
struct IntakeVector {
    std::array<double, kIntakeGroups> values{};

    double operator[](size_t i) const { return values[i]; }
};

/// Counts matching records per group and converts daily groups to per-day
/// averages. Throws DataError when a record carries labels outside the
/// taxonomy.
IntakeVector aggregate_week(const std::vector<LabeledRecord>& records, const GroupMapping& mapping);

} // namespace dietsynth
