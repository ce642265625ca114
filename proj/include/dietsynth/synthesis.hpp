#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dietsynth/profiles.hpp"
#include "dietsynth/rng.hpp"
#include "dietsynth/taxonomy.hpp"

namespace dietsynth {

enum class WeekKind : uint8_t { Primary, Secondary };

/// Slot capacities: a main meal carries up to four records (main dish, side
/// dish or bread, dessert, drink), any other meal up to two (snack, drink).
inline constexpr int kMainMealSlots = 4;
inline constexpr int kSnackMealSlots = 2;

/// Meal types a slot position accepts, in preference order.
std::span<const MealType> slot_accepted_types(bool main_meal, int position);

inline int day_capacity(int n_meals, int n_main_meals) {
    return n_main_meals * kMainMealSlots + (n_meals - n_main_meals) * kSnackMealSlots;
}

// ---------------------------------------------------------------------------
// Subject instantiation
// ---------------------------------------------------------------------------

/// One subject drawn from a profile: fixed meal structure, a week-kind plan,
/// and the sampled weekly frequency for every owning parameter (daily ranges
/// are stored as weekly totals, value x 7).
struct SubjectSpec {
    std::string subject_id;
    std::string profile_id;
    ProfileType profile_type = ProfileType::Healthy;
    std::optional<std::string> secondary_profile_id;
    std::optional<ProfileType> secondary_type;
    Region region = Region::International;
    int n_meals = 0;
    int n_main_meals = 0;
    std::vector<WeekKind> week_kinds;                      // one per week
    std::vector<std::map<std::string, int>> weekly_counts; // owner key -> weekly count

    EffectiveParams primary_params;
    std::optional<EffectiveParams> secondary_params;
    // Meal types each owner can serve with region-compatible items.
    std::map<std::string, uint8_t> primary_owner_types;
    std::map<std::string, uint8_t> secondary_owner_types;

    const EffectiveParams& week_params(int week) const;
    const std::map<std::string, uint8_t>& week_owner_types(int week) const;
    WeekKind kind_of_week(int week) const { return week_kinds.at(week - 1); }
    ProfileType ground_truth(int week) const;
};

struct ResolvedProfile {
    const ProfileConfig* profile = nullptr;
    EffectiveParams params;
};

ResolvedProfile resolve_profile(const ProfileConfig& profile, const FoodPool& pool);

/// Draws a subject: meal structure uniform in the profile ranges, secondary
/// weeks (ceil(fraction x n_weeks) of them) chosen without replacement, and
/// one frequency per owner per range (re-drawn each week when the owning
/// profile sets weekly_resample). Verifies every owner with a potentially
/// non-zero quota has at least one region-compatible item.
SubjectSpec instantiate_subject(const ResolvedProfile& primary, const ResolvedProfile* secondary,
                                const FoodPool& pool, std::string subject_id, Region region,
                                int n_weeks, Rng& rng);

// ---------------------------------------------------------------------------
// Week balancing
// ---------------------------------------------------------------------------

/// Record placements for one week: which owner fills which (day, meal, slot).
struct WeekAssignment {
    struct Placement {
        int day = 0;        // 1..7
        int meal_index = 0; // 0..n_meals-1; indices < n_main_meals are main meals
        int position = 0;   // slot within the meal
        std::string owner_key;
    };

    int week = 0;
    int n_meals = 0;
    int n_main_meals = 0;
    std::vector<Placement> placements; // sorted by (day, meal_index, position)

    bool is_main(int meal_index) const { return meal_index < n_main_meals; }
    /// Records of one owner per day (index 0 = day 1).
    std::array<int, 7> day_counts(const std::string& owner_key) const;
    std::array<int, 7> day_totals() const;
};

/// Spreads every owner's weekly count over the 7 days by largest remainder
/// (each owner's per-day counts differ by at most one) with extra units
/// steered to the lightest days, then routes records into meal slots, main
/// meals first. Throws GenerationError naming the overflowing day when the
/// counts cannot fit the week's slots, or the starved day when they cannot
/// cover one record per meal.
WeekAssignment balance_week(const SubjectSpec& spec, int week, Rng& rng);

// ---------------------------------------------------------------------------
// Meal composition
// ---------------------------------------------------------------------------

struct MealRecord {
    int day = 0;
    int meal_index = 0;
    MealType meal_type = MealType::MainMeal;
    std::string item_id;
};

struct WeeklyLog {
    std::string subject_id;
    std::string profile_id;
    int week = 0;
    ProfileType ground_truth = ProfileType::Healthy;
    std::vector<MealRecord> records;
};

struct GenerationReport {
    long long records = 0;
    long long meal_type_fallbacks = 0; // slot filled by an item of another meal type
};

/// Draws one item per placement, uniformly among the owner's region-compatible
/// items that serve the slot's meal type; when none do, any region-compatible
/// owned item is used and the fallback is counted. Throws GenerationError when
/// even the fallback set is empty.
WeeklyLog compose_meals(const WeekAssignment& assignment, const FoodPool& pool,
                        const SubjectSpec& spec, Rng& rng, GenerationReport* report = nullptr);

// ---------------------------------------------------------------------------
// Dataset generation
// ---------------------------------------------------------------------------

struct Dataset {
    uint64_t seed = 0;
    uint64_t manifest_hash = 0;
    std::vector<WeeklyLog> logs;
};

struct GenerationResult {
    Dataset dataset;
    std::vector<SubjectSpec> specs;
    GenerationReport report;
};

/// Generates the full cohort: subjects are numbered sequentially across
/// profiles ("0001"...), assigned to region slots round-robin, and each draws
/// an independent generator seeded from (seed, subject_id), so the output is
/// a pure function of (manifest, profiles, seed, n_weeks).
GenerationResult generate_dataset(const ProfileSet& profiles, const FoodPool& pool, uint64_t seed,
                                  int n_weeks = 4, uint64_t manifest_hash = 0);

} // namespace dietsynth
