#include "dietsynth/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "dietsynth/errors.hpp"

namespace dietsynth {

const OptimalRanges& OptimalRanges::standard() {
    // Reconstruction of guideline bands: per-day fruits, vegetables, cereals;
    // per-week meat, fish, eggs, legumes and caps on level-1/2 products.
    static const OptimalRanges instance{{
        OptimalRange{"fruits", 2, 4},
        OptimalRange{"vegetables", 2, 4},
        OptimalRange{"cereals", 3, 6},
        OptimalRange{"meat", 3, 4},
        OptimalRange{"fish_seafood", 3, 4},
        OptimalRange{"eggs", 3, 4},
        OptimalRange{"legumes", 2, 4},
        OptimalRange{"level_1", 0, 2},
        OptimalRange{"level_2", 0, 3},
    }};
    return instance;
}

OptimalRanges OptimalRanges::from_json(const nlohmann::json& doc) {
    if (!doc.is_object() || !doc.contains("ranges"))
        throw ConfigError("ranges document must be an object with a 'ranges' array");
    const auto& ranges = doc.at("ranges");
    if (!ranges.is_array() || ranges.size() != kIntakeGroups)
        throw ConfigError("ranges document must define exactly 9 groups");

    OptimalRanges out;
    for (size_t i = 0; i < kIntakeGroups; ++i) {
        OptimalRange r;
        try {
            r.group = ranges[i].at("group").get<std::string>();
            r.lower = ranges[i].at("lower").get<double>();
            r.upper = ranges[i].at("upper").get<double>();
        } catch (const nlohmann::json::exception& ex) {
            throw ConfigError(std::string("malformed ranges document: ") + ex.what());
        }
        if (r.group != kGroupNames[i])
            throw ConfigError("ranges entry " + std::to_string(i) + " must be group '" +
                              std::string(kGroupNames[i]) + "', got '" + r.group + "'");
        if (r.lower > r.upper)
            throw ConfigError("range for '" + r.group + "': lower exceeds upper");
        out.entries[i] = std::move(r);
    }
    return out;
}

OptimalRanges OptimalRanges::load_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open ranges file: " + path.string());
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& ex) {
        throw ConfigError("ranges file '" + path.string() + "' is not valid JSON: " + ex.what());
    }
    return from_json(doc);
}

double mahalanobis(const IntakeVector& intake, const OptimalRanges& ranges) {
    double sum = 0.0;
    for (size_t j = 0; j < kIntakeGroups; ++j) {
        const double z = (intake.values[j] - ranges.entries[j].midpoint()) /
                         ranges.entries[j].sigma();
        sum += z * z;
    }
    return std::sqrt(sum);
}

std::vector<double> normalize(std::span<const double> mds, NormalizeMode mode) {
    std::vector<double> out;
    out.reserve(mds.size());
    if (mode.kind == NormalizeMode::Kind::Reference) {
        if (!(mode.md_ref > 0.0)) throw ConfigError("reference distance must be positive");
        for (double md : mds) out.push_back(std::min(md / mode.md_ref, 1.0));
        return out;
    }

    if (mds.size() < 2)
        throw ConfigError("batch min-max normalisation needs at least 2 values");
    const auto [lo_it, hi_it] = std::minmax_element(mds.begin(), mds.end());
    const double lo = *lo_it, hi = *hi_it;
    if (lo == hi) {
        out.assign(mds.size(), 0.0);
        return out;
    }
    for (double md : mds) out.push_back((md - lo) / (hi - lo));
    return out;
}

double healthy_score(double nmd) {
    if (!(nmd >= 0.0 && nmd <= 1.0))
        throw ConfigError("NMD must lie in [0,1], got " + std::to_string(nmd));
    return 1.0 - nmd;
}

std::string_view to_string(DietClass c) {
    return c == DietClass::Healthy ? "Healthy" : "Unhealthy";
}

DietClass classify(double score, double threshold) {
    if (!(score >= 0.0 && score <= 1.0))
        throw ConfigError("healthy score must lie in [0,1], got " + std::to_string(score));
    return score > threshold ? DietClass::Healthy : DietClass::Unhealthy;
}

EvalReport evaluate_counts(const ConfusionCounts& counts, double threshold) {
    if (counts.total() == 0) throw ConfigError("no records to evaluate");
    EvalReport report;
    report.confusion = counts;
    report.threshold = threshold;
    report.accuracy =
        static_cast<double>(counts.tp + counts.tn) / static_cast<double>(counts.total());
    const long long positives = counts.tp + counts.fn;
    report.sensitivity =
        positives == 0 ? 0.0 : static_cast<double>(counts.tp) / static_cast<double>(positives);
    return report;
}

EvalReport evaluate(std::span<const ScoreRecord> records, double threshold) {
    ConfusionCounts counts;
    for (const auto& r : records) {
        if (r.actual == ProfileType::Variable) continue;
        const bool actual_healthy = r.actual == ProfileType::Healthy;
        const bool predicted_healthy = classify(r.healthy_score, threshold) == DietClass::Healthy;
        if (actual_healthy && predicted_healthy) ++counts.tp;
        else if (actual_healthy) ++counts.fn;
        else if (predicted_healthy) ++counts.fp;
        else ++counts.tn;
    }
    return evaluate_counts(counts, threshold);
}

EvalReport sweep_best_threshold(std::span<const ScoreRecord> records) {
    std::set<double> scores;
    for (const auto& r : records)
        if (r.actual != ProfileType::Variable) scores.insert(r.healthy_score);
    if (scores.empty()) throw ConfigError("no records to evaluate");

    std::vector<double> candidates{0.0};
    double prev = 0.0;
    bool have_prev = false;
    for (double s : scores) {
        if (have_prev) candidates.push_back((prev + s) / 2.0);
        prev = s;
        have_prev = true;
    }

    EvalReport best;
    bool first = true;
    for (double t : candidates) {
        EvalReport report = evaluate(records, t);
        const bool better =
            first || report.accuracy > best.accuracy ||
            (report.accuracy == best.accuracy && report.sensitivity > best.sensitivity) ||
            (report.accuracy == best.accuracy && report.sensitivity == best.sensitivity &&
             report.threshold < best.threshold);
        if (better) best = report;
        first = false;
    }
    return best;
}

} // namespace dietsynth
