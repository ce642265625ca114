#include "dietsynth/synthesis.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "dietsynth/errors.hpp"

namespace dietsynth {

namespace {

constexpr uint8_t type_bit(MealType t) { return static_cast<uint8_t>(1u << static_cast<int>(t)); }

uint8_t types_mask(std::span<const MealType> types) {
    uint8_t mask = 0;
    for (MealType t : types) mask |= type_bit(t);
    return mask;
}

constexpr std::array<MealType, 1> kMainDish{MealType::MainMeal};
constexpr std::array<MealType, 2> kMainSide{MealType::SideDish, MealType::Bread};
constexpr std::array<MealType, 2> kMainDessert{MealType::Dessert, MealType::Snack};
constexpr std::array<MealType, 1> kMainDrink{MealType::Drinks};
constexpr std::array<MealType, 3> kSnackFirst{MealType::Snack, MealType::Dessert, MealType::Drinks};
constexpr std::array<MealType, 2> kSnackSecond{MealType::Drinks, MealType::Snack};

} // namespace

std::span<const MealType> slot_accepted_types(bool main_meal, int position) {
    if (main_meal) {
        switch (position) {
        case 0: return kMainDish;
        case 1: return kMainSide;
        case 2: return kMainDessert;
        case 3: return kMainDrink;
        default: return {};
        }
    }
    switch (position) {
    case 0: return kSnackFirst;
    case 1: return kSnackSecond;
    default: return {};
    }
}

// ---------------------------------------------------------------------------
// SubjectSpec
// ---------------------------------------------------------------------------

const EffectiveParams& SubjectSpec::week_params(int week) const {
    if (kind_of_week(week) == WeekKind::Secondary) return *secondary_params;
    return primary_params;
}

const std::map<std::string, uint8_t>& SubjectSpec::week_owner_types(int week) const {
    if (kind_of_week(week) == WeekKind::Secondary) return secondary_owner_types;
    return primary_owner_types;
}

ProfileType SubjectSpec::ground_truth(int week) const {
    if (kind_of_week(week) == WeekKind::Secondary) return *secondary_type;
    return profile_type;
}

ResolvedProfile resolve_profile(const ProfileConfig& profile, const FoodPool& pool) {
    return ResolvedProfile{&profile, resolve_effective_params(profile, pool)};
}

namespace {

std::map<std::string, uint8_t> owner_type_masks(const EffectiveParams& params,
                                                const FoodPool& pool, Region region) {
    std::map<std::string, uint8_t> masks;
    for (const auto& owner : params.owners) {
        uint8_t mask = 0;
        for (const FoodItem* item : pool.items_in(owner.owned, region))
            for (MealType t : item->meal_types) mask |= type_bit(t);
        masks[owner.selector.key()] = mask;
    }
    return masks;
}

std::map<std::string, int> sample_counts(const EffectiveParams& params, Rng& rng) {
    std::map<std::string, int> counts;
    for (const auto& owner : params.owners) {
        int weekly = 0;
        if (!owner.owned.empty()) {
            const int value = rng.uniform_int(owner.range.min, owner.range.max);
            weekly = owner.unit == FrequencyUnit::Daily ? value * 7 : value;
        }
        counts[owner.selector.key()] = weekly;
    }
    return counts;
}

void check_owner_coverage(const EffectiveParams& params, const FoodPool& pool, Region region,
                          const std::string& subject_id) {
    for (const auto& owner : params.owners) {
        if (owner.owned.empty() || owner.range.max == 0) continue;
        if (pool.items_in(owner.owned, region).empty())
            throw GenerationError("subject '" + subject_id + "': selector " +
                                  owner.selector.key() + " has no items for region " +
                                  std::string(to_string(region)));
    }
}

} // namespace

SubjectSpec instantiate_subject(const ResolvedProfile& primary, const ResolvedProfile* secondary,
                                const FoodPool& pool, std::string subject_id, Region region,
                                int n_weeks, Rng& rng) {
    if (n_weeks < 1) throw ConfigError("n_weeks must be at least 1");
    const ProfileConfig& profile = *primary.profile;
    if (profile.general.secondary && secondary == nullptr)
        throw ConfigError("profile '" + profile.id + "' needs its secondary profile resolved");

    SubjectSpec spec;
    spec.subject_id = std::move(subject_id);
    spec.profile_id = profile.id;
    spec.profile_type = profile.type;
    spec.region = region;
    spec.n_meals = rng.uniform_int(profile.general.meals_range.min, profile.general.meals_range.max);
    spec.n_main_meals = rng.uniform_int(profile.general.main_meals_range.min,
                                        profile.general.main_meals_range.max);
    spec.primary_params = primary.params;
    spec.primary_owner_types = owner_type_masks(spec.primary_params, pool, region);

    spec.week_kinds.assign(n_weeks, WeekKind::Primary);
    if (profile.general.secondary) {
        spec.secondary_profile_id = secondary->profile->id;
        spec.secondary_type = secondary->profile->type;
        spec.secondary_params = secondary->params;
        spec.secondary_owner_types = owner_type_masks(*spec.secondary_params, pool, region);

        const double fraction = profile.general.secondary->fraction;
        int k = static_cast<int>(std::ceil(fraction * n_weeks - 1e-9));
        k = std::clamp(k, 1, n_weeks);
        std::vector<int> weeks(n_weeks);
        for (int i = 0; i < n_weeks; ++i) weeks[i] = i;
        rng.shuffle(weeks);
        for (int i = 0; i < k; ++i) spec.week_kinds[weeks[i]] = WeekKind::Secondary;
    }

    check_owner_coverage(spec.primary_params, pool, region, spec.subject_id);
    if (spec.secondary_params)
        check_owner_coverage(*spec.secondary_params, pool, region, spec.subject_id);

    // One draw per owner range; re-drawn per week only under weekly_resample.
    spec.weekly_counts.resize(n_weeks);
    std::optional<std::map<std::string, int>> primary_once;
    std::optional<std::map<std::string, int>> secondary_once;
    const bool primary_resample = profile.weekly_resample;
    const bool secondary_resample =
        secondary != nullptr && secondary->profile != nullptr && secondary->profile->weekly_resample;
    for (int w = 0; w < n_weeks; ++w) {
        if (spec.week_kinds[w] == WeekKind::Primary) {
            if (primary_resample) {
                spec.weekly_counts[w] = sample_counts(spec.primary_params, rng);
            } else {
                if (!primary_once) primary_once = sample_counts(spec.primary_params, rng);
                spec.weekly_counts[w] = *primary_once;
            }
        } else {
            if (secondary_resample) {
                spec.weekly_counts[w] = sample_counts(*spec.secondary_params, rng);
            } else {
                if (!secondary_once) secondary_once = sample_counts(*spec.secondary_params, rng);
                spec.weekly_counts[w] = *secondary_once;
            }
        }
    }
    return spec;
}

// ---------------------------------------------------------------------------
// balance_week
// ---------------------------------------------------------------------------

std::array<int, 7> WeekAssignment::day_counts(const std::string& owner_key) const {
    std::array<int, 7> per_day{};
    for (const auto& p : placements)
        if (p.owner_key == owner_key) ++per_day[p.day - 1];
    return per_day;
}

std::array<int, 7> WeekAssignment::day_totals() const {
    std::array<int, 7> per_day{};
    for (const auto& p : placements) ++per_day[p.day - 1];
    return per_day;
}

namespace {

struct OwnerPlan {
    std::string key;
    int weekly = 0;
    int base = 0; // weekly / 7
    FrequencyUnit unit = FrequencyUnit::Weekly;
    uint8_t types = 0;
    std::array<int, 7> per_day{};
};

// Moving one unit of `plan` from day `from` to day `to` keeps the per-day
// counts of daily-unit owners within the largest-remainder envelope
// {base, base+1}. Weekly-unit owners may move freely.
bool can_move(const OwnerPlan& plan, int from, int to) {
    if (plan.per_day[from] == 0) return false;
    if (plan.unit == FrequencyUnit::Weekly) return true;
    return plan.per_day[from] == plan.base + 1 && plan.per_day[to] == plan.base;
}

} // namespace

WeekAssignment balance_week(const SubjectSpec& spec, int week, Rng& rng) {
    const auto& counts = spec.weekly_counts.at(week - 1);
    const EffectiveParams& params = spec.week_params(week);
    const auto& owner_types = spec.week_owner_types(week);

    const int n = spec.n_meals;
    const int m = spec.n_main_meals;
    const int cap = day_capacity(n, m);

    std::vector<OwnerPlan> plans;
    for (const auto& owner : params.owners) {
        const std::string key = owner.selector.key();
        auto it = counts.find(key);
        const int weekly = it == counts.end() ? 0 : it->second;
        if (weekly == 0) continue;
        OwnerPlan plan;
        plan.key = key;
        plan.weekly = weekly;
        plan.base = weekly / 7;
        plan.unit = owner.unit;
        auto tm = owner_types.find(key);
        plan.types = tm == owner_types.end() ? 0 : tm->second;
        plans.push_back(std::move(plan));
    }

    // Largest counts first so the remainder targeting has room to equalise.
    std::stable_sort(plans.begin(), plans.end(), [](const OwnerPlan& a, const OwnerPlan& b) {
        if ((a.unit == FrequencyUnit::Daily) != (b.unit == FrequencyUnit::Daily))
            return a.unit == FrequencyUnit::Daily;
        if (a.weekly != b.weekly) return a.weekly > b.weekly;
        return a.key < b.key;
    });

    std::array<int, 7> day_total{};
    for (auto& plan : plans) {
        for (int d = 0; d < 7; ++d) {
            plan.per_day[d] = plan.base;
            day_total[d] += plan.base;
        }
        int extras = plan.weekly % 7;
        std::array<bool, 7> granted{};
        while (extras-- > 0) {
            int best = -1;
            for (int d = 0; d < 7; ++d) {
                if (granted[d]) continue;
                if (best == -1 || day_total[d] < day_total[best]) best = d;
            }
            std::vector<int> ties;
            for (int d = 0; d < 7; ++d)
                if (!granted[d] && day_total[d] == day_total[best]) ties.push_back(d);
            const int chosen = ties[rng.index(ties.size())];
            granted[chosen] = true;
            ++plan.per_day[chosen];
            ++day_total[chosen];
        }
    }

    // Repair pass: the per-owner spreading equalises totals only roughly, so
    // shift movable units until every day fits [n, cap].
    for (int iter = 0; iter < 4096; ++iter) {
        int over = -1, under = -1;
        for (int d = 0; d < 7; ++d) {
            if (day_total[d] > cap && over == -1) over = d;
            if (day_total[d] < n && under == -1) under = d;
        }
        if (over == -1 && under == -1) break;

        int from = -1, to = -1;
        if (over != -1) {
            from = over;
            for (int d = 0; d < 7; ++d)
                if (day_total[d] < cap && (to == -1 || day_total[d] < day_total[to])) to = d;
        } else {
            to = under;
            for (int d = 0; d < 7; ++d)
                if (day_total[d] > n && (from == -1 || day_total[d] > day_total[from])) from = d;
        }
        bool moved = false;
        if (from != -1 && to != -1) {
            for (auto& plan : plans) {
                if (!can_move(plan, from, to)) continue;
                --plan.per_day[from];
                ++plan.per_day[to];
                --day_total[from];
                ++day_total[to];
                moved = true;
                break;
            }
        }
        if (!moved) break;
    }

    for (int d = 0; d < 7; ++d) {
        if (day_total[d] > cap)
            throw GenerationError("subject '" + spec.subject_id + "' week " +
                                  std::to_string(week) + ": " + std::to_string(day_total[d]) +
                                  " records exceed the " + std::to_string(cap) +
                                  "-slot capacity of day " + std::to_string(d + 1));
        if (day_total[d] < n)
            throw GenerationError("subject '" + spec.subject_id + "' week " +
                                  std::to_string(week) + ": day " + std::to_string(d + 1) +
                                  " has " + std::to_string(day_total[d]) + " records for " +
                                  std::to_string(n) + " meals");
    }

    // Route each day's records into slots: the main dish of every main meal
    // and the opener of every other meal first, then the remaining records
    // into main-meal slots before snack-meal slots.
    WeekAssignment out;
    out.week = week;
    out.n_meals = n;
    out.n_main_meals = m;

    for (int d = 0; d < 7; ++d) {
        std::vector<int> remaining; // indices into plans, one per record
        for (size_t o = 0; o < plans.size(); ++o)
            for (int c = 0; c < plans[o].per_day[d]; ++c) remaining.push_back(static_cast<int>(o));

        auto take = [&](uint8_t wanted) {
            int pick = -1;
            std::vector<int> fits;
            for (size_t i = 0; i < remaining.size(); ++i)
                if (plans[remaining[i]].types & wanted) fits.push_back(static_cast<int>(i));
            if (!fits.empty()) pick = fits[rng.index(fits.size())];
            else pick = static_cast<int>(rng.index(remaining.size()));
            const int owner = remaining[pick];
            remaining.erase(remaining.begin() + pick);
            return owner;
        };

        auto place = [&](int meal, int position, int owner) {
            out.placements.push_back(WeekAssignment::Placement{d + 1, meal, position,
                                                               plans[owner].key});
        };

        for (int meal = 0; meal < m; ++meal)
            place(meal, 0, take(types_mask(slot_accepted_types(true, 0))));
        for (int meal = m; meal < n; ++meal)
            place(meal, 0, take(types_mask(slot_accepted_types(false, 0))));

        struct OpenSlot {
            int meal;
            int position;
            uint8_t accepted;
        };
        std::vector<OpenSlot> open;
        for (int meal = 0; meal < m; ++meal)
            for (int pos = 1; pos < kMainMealSlots; ++pos)
                open.push_back({meal, pos, types_mask(slot_accepted_types(true, pos))});
        for (int meal = m; meal < n; ++meal)
            for (int pos = 1; pos < kSnackMealSlots; ++pos)
                open.push_back({meal, pos, types_mask(slot_accepted_types(false, pos))});

        rng.shuffle(remaining);
        std::vector<bool> used(open.size(), false);
        for (int owner : remaining) {
            int slot = -1;
            for (size_t s = 0; s < open.size(); ++s) {
                if (used[s]) continue;
                if (open[s].accepted & plans[owner].types) {
                    slot = static_cast<int>(s);
                    break;
                }
            }
            if (slot == -1) {
                for (size_t s = 0; s < open.size(); ++s) {
                    if (!used[s]) {
                        slot = static_cast<int>(s);
                        break;
                    }
                }
            }
            // A free slot always exists: day_total <= cap was verified above.
            used[slot] = true;
            place(open[slot].meal, open[slot].position, owner);
        }
    }

    std::sort(out.placements.begin(), out.placements.end(),
              [](const WeekAssignment::Placement& a, const WeekAssignment::Placement& b) {
                  if (a.day != b.day) return a.day < b.day;
                  if (a.meal_index != b.meal_index) return a.meal_index < b.meal_index;
                  return a.position < b.position;
              });
    return out;
}

// ---------------------------------------------------------------------------
// compose_meals
// ---------------------------------------------------------------------------

WeeklyLog compose_meals(const WeekAssignment& assignment, const FoodPool& pool,
                        const SubjectSpec& spec, Rng& rng, GenerationReport* report) {
    const EffectiveParams& params = spec.week_params(assignment.week);

    std::map<std::string, std::vector<const FoodItem*>> candidates;
    for (const auto& owner : params.owners)
        candidates[owner.selector.key()] = pool.items_in(owner.owned, spec.region);

    WeeklyLog log;
    log.subject_id = spec.subject_id;
    log.profile_id = spec.profile_id;
    log.week = assignment.week;
    log.ground_truth = spec.ground_truth(assignment.week);
    log.records.reserve(assignment.placements.size());

    for (const auto& placement : assignment.placements) {
        const auto accepted = slot_accepted_types(assignment.is_main(placement.meal_index),
                                                  placement.position);
        const auto& all = candidates.at(placement.owner_key);

        std::vector<const FoodItem*> fitting;
        for (const FoodItem* item : all) {
            bool fits = false;
            for (MealType t : accepted)
                if (item->serves(t)) {
                    fits = true;
                    break;
                }
            if (fits) fitting.push_back(item);
        }

        const bool fallback = fitting.empty();
        const auto& source = fallback ? all : fitting;
        if (source.empty())
            throw GenerationError("subject '" + spec.subject_id + "' week " +
                                  std::to_string(assignment.week) + ": no items for " +
                                  placement.owner_key + " in region " +
                                  std::string(to_string(spec.region)));
        if (fallback && report != nullptr) ++report->meal_type_fallbacks;

        const FoodItem* item = source[rng.index(source.size())];

        MealRecord record;
        record.day = placement.day;
        record.meal_index = placement.meal_index;
        record.item_id = item->id;
        if (assignment.is_main(placement.meal_index) && placement.position == 0) {
            record.meal_type = MealType::MainMeal; // structural: one main dish per main meal
        } else {
            // Matched type when the item fits the slot; otherwise the item's
            // own role, never MainMeal (the per-day main-dish count is fixed).
            record.meal_type = accepted.front();
            bool matched = false;
            for (MealType t : accepted)
                if (item->serves(t)) {
                    record.meal_type = t;
                    matched = true;
                    break;
                }
            if (!matched) {
                for (MealType t : item->meal_types)
                    if (t != MealType::MainMeal) {
                        record.meal_type = t;
                        break;
                    }
            }
        }
        log.records.push_back(std::move(record));
        if (report != nullptr) ++report->records;
    }
    return log;
}

// ---------------------------------------------------------------------------
// generate_dataset
// ---------------------------------------------------------------------------

GenerationResult generate_dataset(const ProfileSet& profiles, const FoodPool& pool, uint64_t seed,
                                  int n_weeks, uint64_t manifest_hash) {
    if (profiles.profiles.empty()) throw ConfigError("profile set is empty");
    if (n_weeks < 1) throw ConfigError("n_weeks must be at least 1");

    std::map<std::string, ResolvedProfile> resolved;
    for (const auto& profile : profiles.profiles)
        resolved.emplace(profile.id, resolve_profile(profile, pool));

    GenerationResult result;
    result.dataset.seed = seed;
    result.dataset.manifest_hash = manifest_hash;

    int subject_number = 0;
    for (const auto& profile : profiles.profiles) {
        const ResolvedProfile& primary = resolved.at(profile.id);
        const ResolvedProfile* secondary = nullptr;
        if (profile.general.secondary)
            secondary = &resolved.at(profile.general.secondary->profile_id);

        for (int i = 0; i < profile.general.n_subjects; ++i) {
            ++subject_number;
            char buf[16];
            std::snprintf(buf, sizeof buf, "%04d", subject_number);
            const Region region =
                profile.general.region_slots[i % profile.general.region_slots.size()];

            Rng rng(subject_seed(seed, buf));
            SubjectSpec spec =
                instantiate_subject(primary, secondary, pool, buf, region, n_weeks, rng);
            for (int week = 1; week <= n_weeks; ++week) {
                WeekAssignment assignment = balance_week(spec, week, rng);
                result.dataset.logs.push_back(
                    compose_meals(assignment, pool, spec, rng, &result.report));
            }
            result.specs.push_back(std::move(spec));
        }
    }
    return result;
}

} // namespace dietsynth
