#include "dietsynth/analysis.hpp"

#include <algorithm>
#include <fstream>

#include <nlohmann/json.hpp>

#include "dietsynth/errors.hpp"

namespace dietsynth {

const std::array<std::string_view, kIntakeGroups> kGroupNames = {
    "fruits",  "vegetables", "cereals", "meat",    "fish_seafood",
    "eggs",    "legumes",    "level_1", "level_2",
};

// ---------------------------------------------------------------------------
// Recognition
// ---------------------------------------------------------------------------

LabelProvider pass_through_provider() {
    return [](const MealRecord&, const RecordLabels& truth) { return truth; };
}

RecordLabels recognize(const MealRecord& record, const RecordLabels& ground_truth,
                       const LabelProvider& provider) {
    return provider(record, ground_truth);
}

std::vector<LabeledWeek> label_dataset(const Dataset& dataset, const FoodPool& pool,
                                       const LabelProvider& provider) {
    std::vector<LabeledWeek> out;
    out.reserve(dataset.logs.size());
    for (const WeeklyLog& log : dataset.logs) {
        LabeledWeek week;
        week.subject_id = log.subject_id;
        week.profile_id = log.profile_id;
        week.week = log.week;
        week.ground_truth = log.ground_truth;
        week.records.reserve(log.records.size());
        for (const MealRecord& record : log.records) {
            const FoodItem* item = pool.find(record.item_id);
            if (item == nullptr)
                throw DataError("unknown item id '" + record.item_id + "' in subject '" +
                                log.subject_id + "' week " + std::to_string(log.week));
            RecordLabels truth{item->level, item->category, item->subcategory};
            week.records.push_back(LabeledRecord{record, recognize(record, truth, provider)});
        }
        out.push_back(std::move(week));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Group mapping
// ---------------------------------------------------------------------------

bool GroupRule::matches(const RecordLabels& labels) const {
    if (std::find(levels.begin(), levels.end(), labels.level) != levels.end()) return true;
    if (std::find(categories.begin(), categories.end(), labels.category) != categories.end())
        return true;
    return std::find(subcategories.begin(), subcategories.end(), labels.subcategory) !=
           subcategories.end();
}

namespace {

GroupRule rule(std::string name, FrequencyUnit unit, std::vector<int> levels,
               std::vector<std::string> categories, std::vector<std::string> subcategories) {
    GroupRule r;
    r.name = std::move(name);
    r.unit = unit;
    r.levels = std::move(levels);
    r.categories = std::move(categories);
    r.subcategories = std::move(subcategories);
    return r;
}

} // namespace

const GroupMapping& GroupMapping::standard() {
    static const GroupMapping instance{{
        rule("fruits", FrequencyUnit::Daily, {}, {"Fruits"}, {}),
        rule("vegetables", FrequencyUnit::Daily, {}, {"Vegetables"}, {}),
        rule("cereals", FrequencyUnit::Daily, {6}, {}, {}),
        rule("meat", FrequencyUnit::Weekly, {}, {"Fatty Meat"}, {"White Meat"}),
        rule("fish_seafood", FrequencyUnit::Weekly, {}, {"Fish and Seafood"}, {}),
        rule("eggs", FrequencyUnit::Weekly, {}, {"Eggs"}, {}),
        rule("legumes", FrequencyUnit::Weekly, {}, {"Beans"}, {}),
        rule("level_1", FrequencyUnit::Weekly, {1}, {}, {}),
        rule("level_2", FrequencyUnit::Weekly, {2}, {}, {}),
    }};
    return instance;
}

GroupMapping GroupMapping::from_json(const nlohmann::json& doc) {
    if (!doc.is_object() || !doc.contains("groups"))
        throw ConfigError("mapping document must be an object with a 'groups' array");
    const auto& groups = doc.at("groups");
    if (!groups.is_array() || groups.size() != kIntakeGroups)
        throw ConfigError("mapping must define exactly 9 groups");

    GroupMapping mapping;
    const Taxonomy& taxonomy = Taxonomy::standard();
    for (size_t i = 0; i < kIntakeGroups; ++i) {
        const auto& g = groups[i];
        GroupRule r;
        try {
            r.name = g.at("name").get<std::string>();
            const auto unit_str = g.at("unit").get<std::string>();
            auto unit = frequency_unit_from_string(unit_str);
            if (!unit) throw ConfigError("group '" + r.name + "': unknown unit '" + unit_str + "'");
            r.unit = *unit;
            for (const auto& v : g.value("levels", nlohmann::json::array()))
                r.levels.push_back(v.get<int>());
            for (const auto& v : g.value("categories", nlohmann::json::array()))
                r.categories.push_back(v.get<std::string>());
            for (const auto& v : g.value("subcategories", nlohmann::json::array()))
                r.subcategories.push_back(v.get<std::string>());
        } catch (const nlohmann::json::exception& ex) {
            throw ConfigError(std::string("malformed mapping document: ") + ex.what());
        }

        if (r.name != kGroupNames[i])
            throw ConfigError("mapping group " + std::to_string(i) + " must be named '" +
                              std::string(kGroupNames[i]) + "', got '" + r.name + "'");
        const FrequencyUnit expected = i < 3 ? FrequencyUnit::Daily : FrequencyUnit::Weekly;
        if (r.unit != expected)
            throw ConfigError("mapping group '" + r.name + "' must be " +
                              std::string(to_string(expected)));
        for (int level : r.levels)
            if (!is_valid_level(level))
                throw ConfigError("mapping group '" + r.name + "': unknown level " +
                                  std::to_string(level));
        for (const auto& c : r.categories)
            if (!taxonomy.has_category(c))
                throw ConfigError("mapping group '" + r.name + "': unknown category '" + c + "'");
        for (const auto& s : r.subcategories)
            if (!taxonomy.has_subcategory(s))
                throw ConfigError("mapping group '" + r.name + "': unknown subcategory '" + s +
                                  "'");
        mapping.groups[i] = std::move(r);
    }
    return mapping;
}

GroupMapping GroupMapping::load_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open mapping file: " + path.string());
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& ex) {
        throw ConfigError("mapping file '" + path.string() + "' is not valid JSON: " + ex.what());
    }
    return from_json(doc);
}

// ---------------------------------------------------------------------------
// Aggregation
// ---------------------------------------------------------------------------

IntakeVector aggregate_week(const std::vector<LabeledRecord>& records,
                            const GroupMapping& mapping) {
    const Taxonomy& taxonomy = Taxonomy::standard();
    std::array<long long, kIntakeGroups> counts{};
    for (const auto& labeled : records) {
        const RecordLabels& labels = labeled.labels;
        const Taxonomy::Entry* entry = taxonomy.find_subcategory(labels.subcategory);
        if (entry == nullptr || entry->category != labels.category ||
            entry->level != labels.level)
            throw DataError("record '" + labeled.record.item_id + "': labels (" +
                            std::to_string(labels.level) + ", '" + labels.category + "', '" +
                            labels.subcategory + "') do not resolve in the taxonomy");
        for (size_t g = 0; g < kIntakeGroups; ++g)
            if (mapping.groups[g].matches(labels)) ++counts[g];
    }

    IntakeVector intake;
    for (size_t g = 0; g < kIntakeGroups; ++g) {
        intake.values[g] = static_cast<double>(counts[g]);
        if (mapping.groups[g].unit == FrequencyUnit::Daily) intake.values[g] /= 7.0;
    }
    return intake;
}

} // namespace dietsynth
