#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace dietsynth {

// ---------------------------------------------------------------------------
// Domain enums
// ---------------------------------------------------------------------------

/// One general region plus six specific world regions. International items
/// are compatible with subjects from any region.
enum class Region : uint8_t {
    International,
    NorthernAmerica,
    LatinAmericaCaribbean,
    Europe,
    AfricaWestAsia,
    CentralAsia,
    EastSoutheastAsia,
};

inline constexpr int kRegionCount = 7;

enum class MealType : uint8_t {
    MainMeal,
    Appetizer,
    Snack,
    Dessert,
    SideDish,
    Bread,
    Drinks,
};

inline constexpr int kMealTypeCount = 7;

/// Nutritional levels run 1 (occasional intake, e.g. sweets) through 6
/// (cereals tier).
inline constexpr int kMinLevel = 1;
inline constexpr int kMaxLevel = 6;

inline bool is_valid_level(int level) { return level >= kMinLevel && level <= kMaxLevel; }

std::string_view to_string(Region r);
std::string_view to_string(MealType m);
std::optional<Region> region_from_string(std::string_view s);
std::optional<MealType> meal_type_from_string(std::string_view s);

// ---------------------------------------------------------------------------
// Group selectors
// ---------------------------------------------------------------------------

enum class SelectorTier : uint8_t { Level, Category, Subcategory };

std::string_view to_string(SelectorTier t);
std::optional<SelectorTier> selector_tier_from_string(std::string_view s);

/// Names one node of the taxonomy: a whole nutritional level, a category, or
/// a single subcategory.
struct GroupSelector {
    SelectorTier tier = SelectorTier::Level;
    int level = 0;     // valid when tier == Level
    std::string name;  // valid otherwise

    static GroupSelector for_level(int level);
    static GroupSelector for_category(std::string name);
    static GroupSelector for_subcategory(std::string name);

    /// Canonical key, e.g. "level:5", "category:Fruits". Used for stable
    /// ordering and as the owner key in sampled frequency maps.
    std::string key() const;

    bool operator==(const GroupSelector&) const = default;
};

// ---------------------------------------------------------------------------
// Taxonomy table
// ---------------------------------------------------------------------------

/// The fixed subcategory -> category -> level table the parameter tree and
/// all label validation resolve against. Category assignments for
/// subcategories the source table prints without an explicit parent are this
/// project's own reconstruction; eponymous "<name> (Category)" subcategories
/// mark categories that act as their own leaf.
class Taxonomy {
public:
    struct Entry {
        int level;
        std::string category;
        std::string subcategory;
    };

    static const Taxonomy& standard();

    const std::vector<Entry>& entries() const { return entries_; }

    bool has_category(std::string_view category) const;
    bool has_subcategory(std::string_view subcategory) const;
    const Entry* find_subcategory(std::string_view subcategory) const;
    int level_of_category(std::string_view category) const; // -1 if unknown

    bool resolves(const GroupSelector& sel) const;

    /// All subcategories under a selector, sorted. Throws ConfigError for a
    /// selector that names no taxonomy node.
    std::vector<std::string> subcategories_of(const GroupSelector& sel) const;

    /// True when `candidate` lies inside the subtree named by `root`.
    bool contains(const GroupSelector& root, std::string_view subcategory) const;

    std::vector<std::string> categories_of_level(int level) const; // sorted

private:
    explicit Taxonomy(std::vector<Entry> entries);
    std::vector<Entry> entries_;
};

// ---------------------------------------------------------------------------
// Food items
// ---------------------------------------------------------------------------

/// Taxonomy-labelled stand-in for one food image of the source database.
struct FoodItem {
    std::string id;
    std::string name;
    int level = 0;
    std::string category;
    std::string subcategory;
    std::vector<Region> regions;
    std::vector<MealType> meal_types;

    bool compatible_with(Region subject_region) const;
    bool serves(MealType type) const;
};

/// Immutable, validated item pool. Safe for concurrent reads after load.
class FoodPool {
public:
    /// Parses and validates a manifest document (JSON array of items).
    /// Throws ConfigError on duplicate ids, unknown taxonomy labels, or
    /// empty region/meal-type sets.
    static FoodPool load(const nlohmann::json& manifest);
    static FoodPool load_file(const std::filesystem::path& path);

    const Taxonomy& taxonomy() const { return *taxonomy_; }
    const std::vector<FoodItem>& items() const { return items_; }
    const FoodItem* find(std::string_view id) const;

    /// All items under `sel` whose regions intersect {region, International},
    /// sorted by id. Throws ConfigError on an unresolvable selector.
    std::vector<const FoodItem*> query(const GroupSelector& sel, Region region) const;

    /// Region-compatible items whose subcategory is in `subcategories`
    /// (which must be sorted). Sorted by id.
    std::vector<const FoodItem*> items_in(const std::vector<std::string>& subcategories,
                                          Region region) const;

private:
    const Taxonomy* taxonomy_ = nullptr;
    std::vector<FoodItem> items_; // sorted by id
};

} // namespace dietsynth
