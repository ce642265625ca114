#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "dietsynth/taxonomy.hpp"

namespace dietsynth {

enum class FrequencyUnit : uint8_t { Daily, Weekly };

std::string_view to_string(FrequencyUnit u);
std::optional<FrequencyUnit> frequency_unit_from_string(std::string_view s);

/// Inclusive integer range, min <= max.
struct FreqRange {
    int min = 0;
    int max = 0;

    bool contains(int v) const { return v >= min && v <= max; }
    bool operator==(const FreqRange&) const = default;
};

struct FoodGroupParam {
    GroupSelector selector;
    FrequencyUnit unit = FrequencyUnit::Weekly;
    FreqRange range;

    /// Range expressed as a weekly total (daily ranges scale by 7).
    FreqRange weekly_range() const {
        if (unit == FrequencyUnit::Daily) return {range.min * 7, range.max * 7};
        return range;
    }
};

enum class ProfileType : uint8_t { Healthy, Unhealthy, Medium, Variable };
enum class Regularity : uint8_t { Regular, Irregular };

std::string_view to_string(ProfileType t);
std::optional<ProfileType> profile_type_from_string(std::string_view s);

struct SecondaryRef {
    std::string profile_id;
    double fraction = 0.0; // of weeks following the secondary profile, in (0,1)
};

struct GeneralParams {
    int n_subjects = 0;
    FreqRange meals_range;      // within [3,5]
    FreqRange main_meals_range; // within [1,3]; max <= meals_range.min
    std::vector<Region> region_slots;
    Regularity regularity = Regularity::Regular;
    std::optional<SecondaryRef> secondary;
};

/// Six specific regions plus two international slots; ~1/8 of a profile's
/// subjects land on each.
std::vector<Region> default_region_slots();

struct ProfileConfig {
    std::string id;
    ProfileType type = ProfileType::Healthy;
    GeneralParams general;
    std::vector<FoodGroupParam> food_params;
    bool weekly_resample = false; // re-sample frequencies independently each week

    const FoodGroupParam* find_param(const GroupSelector& sel) const;
};

struct ProfileSet {
    std::vector<ProfileConfig> profiles;

    const ProfileConfig* find(std::string_view id) const;
};

/// Parses and validates a profile-set document. All six level parameters
/// must be present in every profile; secondary references must resolve and
/// force Irregular regularity.
ProfileSet parse_profiles(const nlohmann::json& doc);
ProfileSet parse_profiles_file(const std::filesystem::path& path);

nlohmann::json to_json(const ProfileSet& set);

// ---------------------------------------------------------------------------
// Hierarchy resolution
// ---------------------------------------------------------------------------

/// The profile's parameter tree flattened into per-subcategory ownership:
/// every subcategory of the taxonomy is owned by its most specific configured
/// ancestor. An owner's quota is collective over all subcategories it owns;
/// subtrees captured by a more specific parameter are excluded from the
/// ancestor's quota.
struct EffectiveParams {
    struct Owner {
        GroupSelector selector;
        FrequencyUnit unit = FrequencyUnit::Weekly;
        FreqRange range;
        std::vector<std::string> owned; // sorted subcategory names
    };

    std::vector<Owner> owners;               // sorted by selector key
    std::map<std::string, size_t> owner_of;  // subcategory -> index into owners

    const Owner* owner_of_subcategory(std::string_view subcategory) const;
    const Owner* find_owner(std::string_view selector_key) const;
};

/// Throws ConfigError when a parameter names a node absent from the pool's
/// taxonomy or when a parameter that owns no subcategories demands a
/// non-zero minimum frequency.
EffectiveParams resolve_effective_params(const ProfileConfig& profile, const FoodPool& pool);

} // namespace dietsynth
