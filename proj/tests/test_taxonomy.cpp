#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>

#include <nlohmann/json.hpp>

#include "dietsynth/errors.hpp"
#include "dietsynth/taxonomy.hpp"

using namespace dietsynth;

namespace {

nlohmann::json item_json(const std::string& id, int level, const std::string& category,
                         const std::string& subcategory,
                         const std::vector<std::string>& regions = {"International"},
                         const std::vector<std::string>& meal_types = {"Snack"}) {
    nlohmann::json j;
    j["id"] = id;
    j["name"] = id;
    j["level"] = level;
    j["category"] = category;
    j["subcategory"] = subcategory;
    j["regions"] = regions;
    j["meal_types"] = meal_types;
    return j;
}

FoodPool fixture_pool() {
    return FoodPool::load_file(std::string(DIETSYNTH_FIXTURES) + "/food_manifest.json");
}

} // namespace

TEST_CASE("taxonomy table structure") {
    const Taxonomy& tax = Taxonomy::standard();

    SUBCASE("all six levels populated") {
        for (int level = 1; level <= 6; ++level)
            CHECK(!tax.subcategories_of(GroupSelector::for_level(level)).empty());
    }

    SUBCASE("the 13 printed category parameters exist") {
        for (const char* name :
             {"Sweet Products", "Fast Food", "Fatty Meat", "Sandwich & Similar", "Soup & Stews",
              "Fish and Seafood", "Beans", "Eggs", "Dairy Products", "Vegetables", "Fruits",
              "Noodle & Pasta", "Rice"})
            CHECK(tax.has_category(name));
    }

    SUBCASE("the 56 printed subcategory parameters exist") {
        const std::vector<std::string> printed = {
            "Vegetable Snacks", "Bean Snacks", "Other Salty Snacks", "Pâté", "Sauce",
            "Sugary Drinks", "Other Drinks", "Red Meat", "Breaded Meat", "Varied Meat", "Sausage",
            "Mixed Meat", "Dumpling", "Pie", "Stuffed Dough", "Fried Food", "Coffee",
            "Alcoholic Drinks", "Fried Seafood", "Fried Beans", "Fried Dairy Products",
            "Fried or Breaded Fish", "Toast", "Other Types of Bread", "Other Types of Salad",
            "Rice and Meat", "Meat and Vegetables", "Mixed Food", "Vegetable Drinks",
            "Varied Fish", "Mixed Fish", "Mollusk", "Crustacean", "Varied Seafood",
            "Mixed Seafood", "Fresh Beans", "Cooked Beans", "Mixed Beans", "Eggs (Category)",
            "Mixed Eggs", "Cheese", "Yogurt", "White Meat", "Fried Vegetables", "Nut Snacks",
            "Rice and Fish", "Rice and Beans", "Sushi", "Fresh Vegetables", "Mushrooms",
            "Cooked Vegetables", "Mixed Vegetables", "Side Dish Salad", "Noodle & Pasta (Category)",
            "Rice (Category)", "Mixed Rice"};
        CHECK(printed.size() == 56);
        for (const auto& name : printed) CHECK_MESSAGE(tax.has_subcategory(name), name);
    }

    SUBCASE("each subcategory maps to one category and level") {
        std::set<std::string> seen;
        for (const auto& entry : tax.entries()) {
            CHECK(is_valid_level(entry.level));
            CHECK(seen.insert(entry.subcategory).second);
            CHECK(tax.level_of_category(entry.category) == entry.level);
        }
    }
}

TEST_CASE("load_pool basics") {
    SUBCASE("single-row manifest loads") {
        nlohmann::json manifest = nlohmann::json::array();
        manifest.push_back(item_json("apple", 5, "Fruits", "Fruits (Category)", {"International"},
                                     {"Dessert", "Snack"}));
        FoodPool pool = FoodPool::load(manifest);
        CHECK(pool.items().size() == 1);
        CHECK(pool.find("apple") != nullptr);
    }

    SUBCASE("duplicate id rejected") {
        nlohmann::json manifest = nlohmann::json::array();
        manifest.push_back(item_json("apple", 5, "Fruits", "Fruits (Category)"));
        manifest.push_back(item_json("apple", 5, "Fruits", "Fruits (Category)"));
        CHECK_THROWS_AS(FoodPool::load(manifest), ConfigError);
    }

    SUBCASE("unknown labels rejected") {
        nlohmann::json bad_level = nlohmann::json::array();
        bad_level.push_back(item_json("x", 7, "Fruits", "Fruits (Category)"));
        CHECK_THROWS_AS(FoodPool::load(bad_level), ConfigError);

        nlohmann::json bad_cat = nlohmann::json::array();
        bad_cat.push_back(item_json("x", 5, "Fruit", "Fruits (Category)"));
        CHECK_THROWS_AS(FoodPool::load(bad_cat), ConfigError);

        nlohmann::json bad_sub = nlohmann::json::array();
        bad_sub.push_back(item_json("x", 5, "Fruits", "Fruitz"));
        CHECK_THROWS_AS(FoodPool::load(bad_sub), ConfigError);
    }

    SUBCASE("empty regions or meal types rejected") {
        nlohmann::json no_regions = nlohmann::json::array();
        no_regions.push_back(item_json("x", 5, "Fruits", "Fruits (Category)", {}));
        CHECK_THROWS_AS(FoodPool::load(no_regions), ConfigError);

        nlohmann::json no_types = nlohmann::json::array();
        no_types.push_back(item_json("x", 5, "Fruits", "Fruits (Category)", {"International"}, {}));
        CHECK_THROWS_AS(FoodPool::load(no_types), ConfigError);
    }
}

TEST_CASE("fixture manifest covers every selector") {
    FoodPool pool = fixture_pool();
    CHECK(pool.items().size() >= 120);

    const Taxonomy& tax = pool.taxonomy();
    std::set<int> levels;
    for (const auto& item : pool.items()) levels.insert(item.level);
    CHECK(levels.size() == 6);

    // Exhaustive sweep: every taxonomy node resolves to at least one
    // International item, so any profile selector works for any region.
    for (const auto& entry : tax.entries()) {
        for (Region region :
             {Region::International, Region::Europe, Region::NorthernAmerica,
              Region::LatinAmericaCaribbean, Region::AfricaWestAsia, Region::CentralAsia,
              Region::EastSoutheastAsia}) {
            auto hits = pool.query(GroupSelector::for_subcategory(entry.subcategory), region);
            CHECK_MESSAGE(!hits.empty(), entry.subcategory << " for region "
                                                           << to_string(region));
        }
    }
}

TEST_CASE("query semantics") {
    FoodPool pool = fixture_pool();

    SUBCASE("level query matches a linear-scan oracle") {
        for (Region region : {Region::Europe, Region::International, Region::CentralAsia}) {
            auto got = pool.query(GroupSelector::for_level(5), region);
            std::vector<std::string> oracle;
            for (const auto& item : pool.items())
                if (item.level == 5 && item.compatible_with(region)) oracle.push_back(item.id);
            std::sort(oracle.begin(), oracle.end());
            REQUIRE(got.size() == oracle.size());
            for (size_t i = 0; i < got.size(); ++i) CHECK(got[i]->id == oracle[i]);
        }
    }

    SUBCASE("category query is a subset of its level query") {
        auto level5 = pool.query(GroupSelector::for_level(5), Region::International);
        auto fruits = pool.query(GroupSelector::for_category("Fruits"), Region::International);
        CHECK(!fruits.empty());
        std::set<std::string> level_ids;
        for (auto* item : level5) level_ids.insert(item->id);
        for (auto* item : fruits) CHECK(level_ids.count(item->id) == 1);
    }

    SUBCASE("region-restricted subcategory can be empty") {
        nlohmann::json manifest = nlohmann::json::array();
        manifest.push_back(item_json("nigiri", 4, "Rice Dishes", "Sushi", {"EastSoutheastAsia"},
                                     {"MainMeal"}));
        FoodPool sushi_pool = FoodPool::load(manifest);
        CHECK(sushi_pool.query(GroupSelector::for_subcategory("Sushi"), Region::Europe).empty());
        CHECK(sushi_pool.query(GroupSelector::for_subcategory("Sushi"), Region::EastSoutheastAsia)
                  .size() == 1);
    }

    SUBCASE("unknown selector throws") {
        CHECK_THROWS_AS(pool.query(GroupSelector::for_category("Nope"), Region::Europe),
                        ConfigError);
    }

    SUBCASE("level partitions into categories, categories into subcategories") {
        const Taxonomy& tax = pool.taxonomy();
        for (int level = 1; level <= 6; ++level) {
            for (Region region : {Region::Europe, Region::EastSoutheastAsia}) {
                auto by_level = pool.query(GroupSelector::for_level(level), region);

                std::vector<std::string> via_categories;
                for (const auto& cat : tax.categories_of_level(level))
                    for (auto* item : pool.query(GroupSelector::for_category(cat), region))
                        via_categories.push_back(item->id);
                std::sort(via_categories.begin(), via_categories.end());

                std::vector<std::string> via_subcategories;
                for (const auto& entry : tax.entries())
                    if (entry.level == level)
                        for (auto* item : pool.query(
                                 GroupSelector::for_subcategory(entry.subcategory), region))
                            via_subcategories.push_back(item->id);
                std::sort(via_subcategories.begin(), via_subcategories.end());

                REQUIRE(by_level.size() == via_categories.size());
                REQUIRE(by_level.size() == via_subcategories.size());
                for (size_t i = 0; i < by_level.size(); ++i) {
                    CHECK(by_level[i]->id == via_categories[i]);
                    CHECK(by_level[i]->id == via_subcategories[i]);
                }
            }
        }
    }

    SUBCASE("query is pure: repeated calls give identical ordered output") {
        auto a = pool.query(GroupSelector::for_level(4), Region::Europe);
        auto b = pool.query(GroupSelector::for_level(4), Region::Europe);
        REQUIRE(a.size() == b.size());
        for (size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
        CHECK(std::is_sorted(a.begin(), a.end(), [](const FoodItem* x, const FoodItem* y) {
            return x->id < y->id;
        }));
    }

    SUBCASE("every returned item intersects {region, International}") {
        for (Region region : {Region::Europe, Region::LatinAmericaCaribbean}) {
            for (auto* item : pool.query(GroupSelector::for_level(4), region)) {
                const bool ok =
                    std::any_of(item->regions.begin(), item->regions.end(), [&](Region r) {
                        return r == region || r == Region::International;
                    });
                CHECK(ok);
            }
        }
    }
}
