#include "dietsynth/profiles.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "dietsynth/errors.hpp"

namespace dietsynth {

std::string_view to_string(FrequencyUnit u) {
    return u == FrequencyUnit::Daily ? "daily" : "weekly";
}

std::optional<FrequencyUnit> frequency_unit_from_string(std::string_view s) {
    if (s == "daily") return FrequencyUnit::Daily;
    if (s == "weekly") return FrequencyUnit::Weekly;
    return std::nullopt;
}

std::string_view to_string(ProfileType t) {
    switch (t) {
    case ProfileType::Healthy: return "Healthy";
    case ProfileType::Unhealthy: return "Unhealthy";
    case ProfileType::Medium: return "Medium";
    case ProfileType::Variable: return "Variable";
    }
    return "?";
}

std::optional<ProfileType> profile_type_from_string(std::string_view s) {
    if (s == "Healthy") return ProfileType::Healthy;
    if (s == "Unhealthy") return ProfileType::Unhealthy;
    if (s == "Medium") return ProfileType::Medium;
    if (s == "Variable") return ProfileType::Variable;
    return std::nullopt;
}

std::vector<Region> default_region_slots() {
    return {Region::NorthernAmerica, Region::LatinAmericaCaribbean, Region::Europe,
            Region::AfricaWestAsia,  Region::CentralAsia,           Region::EastSoutheastAsia,
            Region::International,   Region::International};
}

const FoodGroupParam* ProfileConfig::find_param(const GroupSelector& sel) const {
    for (const auto& p : food_params)
        if (p.selector == sel) return &p;
    return nullptr;
}

const ProfileConfig* ProfileSet::find(std::string_view id) const {
    for (const auto& p : profiles)
        if (p.id == id) return &p;
    return nullptr;
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

namespace {

GroupSelector parse_selector(const nlohmann::json& j, const std::string& ctx) {
    const auto tier_str = j.at("tier").get<std::string>();
    auto tier = selector_tier_from_string(tier_str);
    if (!tier) throw ConfigError(ctx + ": unknown selector tier '" + tier_str + "'");
    if (*tier == SelectorTier::Level) {
        const int level = j.at("value").get<int>();
        if (!is_valid_level(level))
            throw ConfigError(ctx + ": level selector out of range: " + std::to_string(level));
        return GroupSelector::for_level(level);
    }
    const auto name = j.at("value").get<std::string>();
    GroupSelector sel = *tier == SelectorTier::Category ? GroupSelector::for_category(name)
                                                        : GroupSelector::for_subcategory(name);
    if (!Taxonomy::standard().resolves(sel))
        throw ConfigError(ctx + ": selector " + sel.key() + " names no taxonomy node");
    return sel;
}

FreqRange parse_range(const nlohmann::json& j, const std::string& ctx) {
    if (!j.is_array() || j.size() != 2)
        throw ConfigError(ctx + ": range must be a [min, max] pair");
    FreqRange r{j[0].get<int>(), j[1].get<int>()};
    if (r.min < 0) throw ConfigError(ctx + ": negative frequency");
    if (r.min > r.max)
        throw ConfigError(ctx + ": range min " + std::to_string(r.min) + " exceeds max " +
                          std::to_string(r.max));
    return r;
}

ProfileConfig parse_profile(const nlohmann::json& j) {
    ProfileConfig p;
    p.id = j.at("id").get<std::string>();
    const std::string ctx = "profile '" + p.id + "'";

    const auto type_str = j.at("type").get<std::string>();
    auto type = profile_type_from_string(type_str);
    if (!type) throw ConfigError(ctx + ": unknown profile type '" + type_str + "'");
    p.type = *type;

    const auto& gen = j.at("general");
    p.general.n_subjects = gen.at("n_subjects").get<int>();
    if (p.general.n_subjects <= 0) throw ConfigError(ctx + ": n_subjects must be positive");
    p.general.meals_range = parse_range(gen.at("meals"), ctx + " meals");
    p.general.main_meals_range = parse_range(gen.at("main_meals"), ctx + " main_meals");
    if (p.general.meals_range.min < 3 || p.general.meals_range.max > 5)
        throw ConfigError(ctx + ": meals range must lie within [3,5]");
    if (p.general.main_meals_range.min < 1 || p.general.main_meals_range.max > 3)
        throw ConfigError(ctx + ": main_meals range must lie within [1,3]");
    if (p.general.main_meals_range.max > p.general.meals_range.min)
        throw ConfigError(ctx + ": main_meals max exceeds meals min");

    if (gen.contains("region_slots")) {
        for (const auto& r : gen.at("region_slots")) {
            auto region = region_from_string(r.get<std::string>());
            if (!region) throw ConfigError(ctx + ": unknown region '" + r.get<std::string>() + "'");
            p.general.region_slots.push_back(*region);
        }
        if (p.general.region_slots.empty())
            throw ConfigError(ctx + ": region_slots must not be empty");
    } else {
        p.general.region_slots = default_region_slots();
    }

    if (gen.contains("regularity")) {
        const auto reg = gen.at("regularity").get<std::string>();
        if (reg == "Regular") p.general.regularity = Regularity::Regular;
        else if (reg == "Irregular") p.general.regularity = Regularity::Irregular;
        else throw ConfigError(ctx + ": unknown regularity '" + reg + "'");
    }

    if (gen.contains("secondary") && !gen.at("secondary").is_null()) {
        SecondaryRef ref;
        ref.profile_id = gen.at("secondary").at("profile_id").get<std::string>();
        ref.fraction = gen.at("secondary").at("fraction").get<double>();
        if (!(ref.fraction > 0.0 && ref.fraction < 1.0))
            throw ConfigError(ctx + ": secondary fraction must lie in (0,1)");
        p.general.secondary = ref;
        // A configured secondary profile makes the diet irregular by definition.
        p.general.regularity = Regularity::Irregular;
    } else if (p.general.regularity == Regularity::Irregular) {
        throw ConfigError(ctx + ": Irregular regularity requires a secondary profile");
    }

    std::set<std::string> seen;
    for (const auto& fp : j.at("food_params")) {
        FoodGroupParam param;
        param.selector = parse_selector(fp.at("selector"), ctx);
        const auto unit_str = fp.at("unit").get<std::string>();
        auto unit = frequency_unit_from_string(unit_str);
        if (!unit) throw ConfigError(ctx + ": unknown frequency unit '" + unit_str + "'");
        param.unit = *unit;
        param.range = parse_range(fp.at("range"), ctx + " param " + param.selector.key());
        if (!seen.insert(param.selector.key()).second)
            throw ConfigError(ctx + ": duplicate parameter for " + param.selector.key());
        p.food_params.push_back(std::move(param));
    }

    for (int level = kMinLevel; level <= kMaxLevel; ++level) {
        if (seen.find("level:" + std::to_string(level)) == seen.end())
            throw ConfigError(ctx + ": missing required level " + std::to_string(level) +
                              " parameter");
    }

    p.weekly_resample = j.value("weekly_resample", false);
    return p;
}

} // namespace

ProfileSet parse_profiles(const nlohmann::json& doc) {
    if (!doc.is_object() || !doc.contains("profiles"))
        throw ConfigError("profile document must be an object with a 'profiles' array");
    ProfileSet set;
    try {
        for (const auto& j : doc.at("profiles"))
            set.profiles.push_back(parse_profile(j));
    } catch (const nlohmann::json::exception& ex) {
        throw ConfigError(std::string("malformed profile document: ") + ex.what());
    }

    std::set<std::string> ids;
    for (const auto& p : set.profiles)
        if (!ids.insert(p.id).second) throw ConfigError("duplicate profile id '" + p.id + "'");

    for (const auto& p : set.profiles) {
        if (!p.general.secondary) continue;
        const ProfileConfig* ref = set.find(p.general.secondary->profile_id);
        if (ref == nullptr)
            throw ConfigError("profile '" + p.id + "': secondary profile '" +
                              p.general.secondary->profile_id + "' does not exist");
        if (ref->general.secondary)
            throw ConfigError("profile '" + p.id + "': secondary profile '" + ref->id +
                              "' must not itself be irregular");
    }
    return set;
}

ProfileSet parse_profiles_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open profile file: " + path.string());
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& ex) {
        throw ConfigError("profile file '" + path.string() + "' is not valid JSON: " + ex.what());
    }
    return parse_profiles(doc);
}

nlohmann::json to_json(const ProfileSet& set) {
    nlohmann::json profiles = nlohmann::json::array();
    for (const auto& p : set.profiles) {
        nlohmann::json gen;
        gen["n_subjects"] = p.general.n_subjects;
        gen["meals"] = {p.general.meals_range.min, p.general.meals_range.max};
        gen["main_meals"] = {p.general.main_meals_range.min, p.general.main_meals_range.max};
        nlohmann::json slots = nlohmann::json::array();
        for (Region r : p.general.region_slots) slots.push_back(std::string(to_string(r)));
        gen["region_slots"] = slots;
        gen["regularity"] =
            p.general.regularity == Regularity::Regular ? "Regular" : "Irregular";
        if (p.general.secondary) {
            gen["secondary"] = {{"profile_id", p.general.secondary->profile_id},
                                {"fraction", p.general.secondary->fraction}};
        }

        nlohmann::json params = nlohmann::json::array();
        for (const auto& fp : p.food_params) {
            nlohmann::json sel;
            sel["tier"] = std::string(to_string(fp.selector.tier));
            if (fp.selector.tier == SelectorTier::Level) sel["value"] = fp.selector.level;
            else sel["value"] = fp.selector.name;
            params.push_back({{"selector", sel},
                              {"unit", std::string(to_string(fp.unit))},
                              {"range", {fp.range.min, fp.range.max}}});
        }

        profiles.push_back({{"id", p.id},
                            {"type", std::string(to_string(p.type))},
                            {"general", gen},
                            {"food_params", params},
                            {"weekly_resample", p.weekly_resample}});
    }
    return nlohmann::json{{"profiles", profiles}};
}

// ---------------------------------------------------------------------------
// Hierarchy resolution
// ---------------------------------------------------------------------------

const EffectiveParams::Owner* EffectiveParams::owner_of_subcategory(
    std::string_view subcategory) const {
    auto it = owner_of.find(std::string(subcategory));
    if (it == owner_of.end()) return nullptr;
    return &owners[it->second];
}

const EffectiveParams::Owner* EffectiveParams::find_owner(std::string_view selector_key) const {
    for (const auto& o : owners)
        if (o.selector.key() == selector_key) return &o;
    return nullptr;
}

EffectiveParams resolve_effective_params(const ProfileConfig& profile, const FoodPool& pool) {
    const Taxonomy& taxonomy = pool.taxonomy();
    const std::string ctx = "profile '" + profile.id + "'";

    for (const auto& param : profile.food_params)
        if (!taxonomy.resolves(param.selector))
            throw ConfigError(ctx + ": selector " + param.selector.key() +
                              " names no taxonomy node");

    auto specificity = [](SelectorTier t) {
        switch (t) {
        case SelectorTier::Subcategory: return 2;
        case SelectorTier::Category: return 1;
        case SelectorTier::Level: return 0;
        }
        return -1;
    };

    // Most specific configured ancestor wins for each subcategory. Every
    // subcategory has one: the six level parameters are mandatory.
    std::map<std::string, const FoodGroupParam*> owner_param;
    for (const auto& entry : taxonomy.entries()) {
        const FoodGroupParam* best = nullptr;
        for (const auto& param : profile.food_params) {
            if (!taxonomy.contains(param.selector, entry.subcategory)) continue;
            if (best == nullptr ||
                specificity(param.selector.tier) > specificity(best->selector.tier))
                best = &param;
        }
        if (best == nullptr)
            throw ConfigError(ctx + ": subcategory '" + entry.subcategory +
                              "' has no configured ancestor");
        owner_param[entry.subcategory] = best;
    }

    EffectiveParams effective;
    std::map<std::string, size_t> index_by_key;
    for (const auto& param : profile.food_params) {
        EffectiveParams::Owner owner;
        owner.selector = param.selector;
        owner.unit = param.unit;
        owner.range = param.range;
        index_by_key[param.selector.key()] = effective.owners.size();
        effective.owners.push_back(std::move(owner));
    }

    for (const auto& [subcategory, param] : owner_param) {
        const size_t idx = index_by_key.at(param->selector.key());
        effective.owners[idx].owned.push_back(subcategory);
        effective.owner_of[subcategory] = idx;
    }
    for (auto& owner : effective.owners) std::sort(owner.owned.begin(), owner.owned.end());

    // A parameter fully shadowed by more specific ones owns nothing and can
    // never be satisfied unless its minimum is zero.
    for (const auto& owner : effective.owners)
        if (owner.owned.empty() && owner.range.min > 0)
            throw ConfigError(ctx + ": parameter " + owner.selector.key() +
                              " owns no subcategories (fully overridden) but requires a "
                              "non-zero minimum frequency");

    // Deterministic owner order, keyed by selector.
    std::vector<size_t> order(effective.owners.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        return effective.owners[a].selector.key() < effective.owners[b].selector.key();
    });
    std::vector<EffectiveParams::Owner> sorted;
    std::vector<size_t> new_index(order.size());
    sorted.reserve(order.size());
    for (size_t rank = 0; rank < order.size(); ++rank) {
        new_index[order[rank]] = rank;
        sorted.push_back(std::move(effective.owners[order[rank]]));
    }
    effective.owners = std::move(sorted);
    for (auto& [sub, idx] : effective.owner_of) idx = new_index[idx];

    return effective;
}

} // namespace dietsynth
