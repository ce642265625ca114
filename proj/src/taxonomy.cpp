#include "dietsynth/taxonomy.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "dietsynth/errors.hpp"

namespace dietsynth {

namespace {

struct RegionName {
    Region value;
    std::string_view name;
};

constexpr RegionName kRegionNames[] = {
    {Region::International, "International"},
    {Region::NorthernAmerica, "NorthernAmerica"},
    {Region::LatinAmericaCaribbean, "LatinAmericaCaribbean"},
    {Region::Europe, "Europe"},
    {Region::AfricaWestAsia, "AfricaWestAsia"},
    {Region::CentralAsia, "CentralAsia"},
    {Region::EastSoutheastAsia, "EastSoutheastAsia"},
};

struct MealTypeName {
    MealType value;
    std::string_view name;
};

constexpr MealTypeName kMealTypeNames[] = {
    {MealType::MainMeal, "MainMeal"},
    {MealType::Appetizer, "Appetizer"},
    {MealType::Snack, "Snack"},
    {MealType::Dessert, "Dessert"},
    {MealType::SideDish, "SideDish"},
    {MealType::Bread, "Bread"},
    {MealType::Drinks, "Drinks"},
};

} // namespace

std::string_view to_string(Region r) {
    for (const auto& e : kRegionNames)
        if (e.value == r) return e.name;
    return "?";
}

std::string_view to_string(MealType m) {
    for (const auto& e : kMealTypeNames)
        if (e.value == m) return e.name;
    return "?";
}

std::optional<Region> region_from_string(std::string_view s) {
    for (const auto& e : kRegionNames)
        if (e.name == s) return e.value;
    return std::nullopt;
}

std::optional<MealType> meal_type_from_string(std::string_view s) {
    for (const auto& e : kMealTypeNames)
        if (e.name == s) return e.value;
    return std::nullopt;
}

std::string_view to_string(SelectorTier t) {
    switch (t) {
    case SelectorTier::Level: return "level";
    case SelectorTier::Category: return "category";
    case SelectorTier::Subcategory: return "subcategory";
    }
    return "?";
}

std::optional<SelectorTier> selector_tier_from_string(std::string_view s) {
    if (s == "level") return SelectorTier::Level;
    if (s == "category") return SelectorTier::Category;
    if (s == "subcategory") return SelectorTier::Subcategory;
    return std::nullopt;
}

GroupSelector GroupSelector::for_level(int level) {
    GroupSelector s;
    s.tier = SelectorTier::Level;
    s.level = level;
    return s;
}

GroupSelector GroupSelector::for_category(std::string name) {
    GroupSelector s;
    s.tier = SelectorTier::Category;
    s.name = std::move(name);
    return s;
}

GroupSelector GroupSelector::for_subcategory(std::string name) {
    GroupSelector s;
    s.tier = SelectorTier::Subcategory;
    s.name = std::move(name);
    return s;
}

std::string GroupSelector::key() const {
    if (tier == SelectorTier::Level) return "level:" + std::to_string(level);
    return std::string(to_string(tier)) + ":" + name;
}

// ---------------------------------------------------------------------------
// Canonical table
// ---------------------------------------------------------------------------

namespace {

Taxonomy::Entry e(int level, const char* category, const char* subcategory) {
    return Taxonomy::Entry{level, category, subcategory};
}

std::vector<Taxonomy::Entry> standard_entries() {
    return {
        // Level 1
        e(1, "Sweet Products", "Sweet Products (Category)"),
        e(1, "Fast Food", "Fast Food (Category)"),
        e(1, "Salty Snacks", "Vegetable Snacks"),
        e(1, "Salty Snacks", "Bean Snacks"),
        e(1, "Salty Snacks", "Other Salty Snacks"),
        e(1, "Sauces & Spreads", "Pâté"),
        e(1, "Sauces & Spreads", "Sauce"),
        e(1, "Soft Drinks", "Sugary Drinks"),
        e(1, "Soft Drinks", "Other Drinks"),
        // Level 2
        e(2, "Fatty Meat", "Red Meat"),
        e(2, "Fatty Meat", "Breaded Meat"),
        e(2, "Fatty Meat", "Varied Meat"),
        e(2, "Fatty Meat", "Sausage"),
        e(2, "Fatty Meat", "Mixed Meat"),
        e(2, "Processed Dishes", "Dumpling"),
        e(2, "Processed Dishes", "Pie"),
        e(2, "Processed Dishes", "Stuffed Dough"),
        e(2, "Processed Dishes", "Fried Food"),
        e(2, "Caffeinated & Alcoholic Drinks", "Coffee"),
        e(2, "Caffeinated & Alcoholic Drinks", "Alcoholic Drinks"),
        // Level 3
        e(3, "Sandwich & Similar", "Sandwich & Similar (Category)"),
        e(3, "Sandwich & Similar", "Toast"),
        e(3, "Sandwich & Similar", "Other Types of Bread"),
        e(3, "Fried Dishes", "Fried Seafood"),
        e(3, "Fried Dishes", "Fried Beans"),
        e(3, "Fried Dishes", "Fried Dairy Products"),
        e(3, "Fried Dishes", "Fried or Breaded Fish"),
        e(3, "Mixed Dishes", "Other Types of Salad"),
        e(3, "Mixed Dishes", "Rice and Meat"),
        e(3, "Mixed Dishes", "Meat and Vegetables"),
        e(3, "Mixed Dishes", "Mixed Food"),
        e(3, "Plant Drinks", "Vegetable Drinks"),
        // Level 4
        e(4, "Soup & Stews", "Soup & Stews (Category)"),
        e(4, "Fish and Seafood", "Varied Fish"),
        e(4, "Fish and Seafood", "Mixed Fish"),
        e(4, "Fish and Seafood", "Mollusk"),
        e(4, "Fish and Seafood", "Crustacean"),
        e(4, "Fish and Seafood", "Varied Seafood"),
        e(4, "Fish and Seafood", "Mixed Seafood"),
        e(4, "Beans", "Fresh Beans"),
        e(4, "Beans", "Cooked Beans"),
        e(4, "Beans", "Mixed Beans"),
        e(4, "Eggs", "Eggs (Category)"),
        e(4, "Eggs", "Mixed Eggs"),
        e(4, "Dairy Products", "Cheese"),
        e(4, "Dairy Products", "Yogurt"),
        e(4, "Lean Meat", "White Meat"),
        e(4, "Nuts & Garnishes", "Fried Vegetables"),
        e(4, "Nuts & Garnishes", "Nut Snacks"),
        e(4, "Rice Dishes", "Rice and Fish"),
        e(4, "Rice Dishes", "Rice and Beans"),
        e(4, "Rice Dishes", "Sushi"),
        // Level 5
        e(5, "Vegetables", "Fresh Vegetables"),
        e(5, "Vegetables", "Mushrooms"),
        e(5, "Vegetables", "Cooked Vegetables"),
        e(5, "Vegetables", "Mixed Vegetables"),
        e(5, "Vegetables", "Side Dish Salad"),
        e(5, "Fruits", "Fruits (Category)"),
        // Level 6
        e(6, "Noodle & Pasta", "Noodle & Pasta (Category)"),
        e(6, "Rice", "Rice (Category)"),
        e(6, "Rice", "Mixed Rice"),
        e(6, "Bread", "Bread"),
    };
}

} // namespace

Taxonomy::Taxonomy(std::vector<Entry> entries) : entries_(std::move(entries)) {}

const Taxonomy& Taxonomy::standard() {
    static const Taxonomy instance{standard_entries()};
    return instance;
}

bool Taxonomy::has_category(std::string_view category) const {
    return level_of_category(category) != -1;
}

bool Taxonomy::has_subcategory(std::string_view subcategory) const {
    return find_subcategory(subcategory) != nullptr;
}

const Taxonomy::Entry* Taxonomy::find_subcategory(std::string_view subcategory) const {
    for (const auto& entry : entries_)
        if (entry.subcategory == subcategory) return &entry;
    return nullptr;
}

int Taxonomy::level_of_category(std::string_view category) const {
    for (const auto& entry : entries_)
        if (entry.category == category) return entry.level;
    return -1;
}

bool Taxonomy::resolves(const GroupSelector& sel) const {
    switch (sel.tier) {
    case SelectorTier::Level: return is_valid_level(sel.level);
    case SelectorTier::Category: return has_category(sel.name);
    case SelectorTier::Subcategory: return has_subcategory(sel.name);
    }
    return false;
}

std::vector<std::string> Taxonomy::subcategories_of(const GroupSelector& sel) const {
    if (!resolves(sel))
        throw ConfigError("unknown taxonomy selector: " + sel.key());
    std::vector<std::string> out;
    for (const auto& entry : entries_) {
        const bool match = sel.tier == SelectorTier::Level ? entry.level == sel.level
                         : sel.tier == SelectorTier::Category ? entry.category == sel.name
                                                              : entry.subcategory == sel.name;
        if (match) out.push_back(entry.subcategory);
    }
    std::sort(out.begin(), out.end());
    return out;
}

bool Taxonomy::contains(const GroupSelector& root, std::string_view subcategory) const {
    const Entry* entry = find_subcategory(subcategory);
    if (entry == nullptr) return false;
    switch (root.tier) {
    case SelectorTier::Level: return entry->level == root.level;
    case SelectorTier::Category: return entry->category == root.name;
    case SelectorTier::Subcategory: return entry->subcategory == root.name;
    }
    return false;
}

std::vector<std::string> Taxonomy::categories_of_level(int level) const {
    std::set<std::string> unique;
    for (const auto& entry : entries_)
        if (entry.level == level) unique.insert(entry.category);
    return {unique.begin(), unique.end()};
}

// ---------------------------------------------------------------------------
// FoodItem / FoodPool
// ---------------------------------------------------------------------------

bool FoodItem::compatible_with(Region subject_region) const {
    for (Region r : regions)
        if (r == subject_region || r == Region::International) return true;
    return false;
}

bool FoodItem::serves(MealType type) const {
    return std::find(meal_types.begin(), meal_types.end(), type) != meal_types.end();
}

namespace {

FoodItem parse_item(const nlohmann::json& row, const Taxonomy& taxonomy) {
    if (!row.is_object()) throw ConfigError("manifest rows must be objects");
    FoodItem item;
    try {
        item.id = row.at("id").get<std::string>();
        item.name = row.value("name", item.id);
        item.level = row.at("level").get<int>();
        item.category = row.at("category").get<std::string>();
        item.subcategory = row.at("subcategory").get<std::string>();
        for (const auto& r : row.at("regions")) {
            auto region = region_from_string(r.get<std::string>());
            if (!region) throw ConfigError("item '" + item.id + "': unknown region '" +
                                           r.get<std::string>() + "'");
            item.regions.push_back(*region);
        }
        for (const auto& m : row.at("meal_types")) {
            auto type = meal_type_from_string(m.get<std::string>());
            if (!type) throw ConfigError("item '" + item.id + "': unknown meal type '" +
                                         m.get<std::string>() + "'");
            item.meal_types.push_back(*type);
        }
    } catch (const nlohmann::json::exception& ex) {
        throw ConfigError(std::string("malformed manifest row: ") + ex.what());
    }

    if (item.id.empty()) throw ConfigError("manifest item with empty id");
    if (item.regions.empty()) throw ConfigError("item '" + item.id + "': empty regions");
    if (item.meal_types.empty()) throw ConfigError("item '" + item.id + "': empty meal_types");
    if (!is_valid_level(item.level))
        throw ConfigError("item '" + item.id + "': unknown level " + std::to_string(item.level));

    const Taxonomy::Entry* entry = taxonomy.find_subcategory(item.subcategory);
    if (entry == nullptr)
        throw ConfigError("item '" + item.id + "': unknown subcategory '" + item.subcategory + "'");
    if (entry->category != item.category)
        throw ConfigError("item '" + item.id + "': subcategory '" + item.subcategory +
                          "' belongs to category '" + entry->category + "', not '" +
                          item.category + "'");
    if (entry->level != item.level)
        throw ConfigError("item '" + item.id + "': subcategory '" + item.subcategory +
                          "' is level " + std::to_string(entry->level) + ", not " +
                          std::to_string(item.level));
    return item;
}

} // namespace

FoodPool FoodPool::load(const nlohmann::json& manifest) {
    if (!manifest.is_array()) throw ConfigError("manifest must be a JSON array of items");
    FoodPool pool;
    pool.taxonomy_ = &Taxonomy::standard();
    pool.items_.reserve(manifest.size());
    for (const auto& row : manifest)
        pool.items_.push_back(parse_item(row, *pool.taxonomy_));

    std::sort(pool.items_.begin(), pool.items_.end(),
              [](const FoodItem& a, const FoodItem& b) { return a.id < b.id; });
    for (size_t i = 1; i < pool.items_.size(); ++i)
        if (pool.items_[i - 1].id == pool.items_[i].id)
            throw ConfigError("duplicate item id '" + pool.items_[i].id + "'");
    return pool;
}

FoodPool FoodPool::load_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open manifest file: " + path.string());
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& ex) {
        throw ConfigError("manifest '" + path.string() + "' is not valid JSON: " + ex.what());
    }
    return load(doc);
}

const FoodItem* FoodPool::find(std::string_view id) const {
    auto it = std::lower_bound(items_.begin(), items_.end(), id,
                               [](const FoodItem& item, std::string_view key) { return item.id < key; });
    if (it == items_.end() || it->id != id) return nullptr;
    return &*it;
}

std::vector<const FoodItem*> FoodPool::query(const GroupSelector& sel, Region region) const {
    if (!taxonomy_->resolves(sel))
        throw ConfigError("unknown taxonomy selector: " + sel.key());
    std::vector<const FoodItem*> out;
    for (const auto& item : items_) {
        if (!taxonomy_->contains(sel, item.subcategory)) continue;
        if (!item.compatible_with(region)) continue;
        out.push_back(&item);
    }
    return out; // items_ is id-sorted, so the result is too
}

std::vector<const FoodItem*> FoodPool::items_in(const std::vector<std::string>& subcategories,
                                                Region region) const {
    std::vector<const FoodItem*> out;
    for (const auto& item : items_) {
        if (!std::binary_search(subcategories.begin(), subcategories.end(), item.subcategory))
            continue;
        if (!item.compatible_with(region)) continue;
        out.push_back(&item);
    }
    return out;
}

} // namespace dietsynth
