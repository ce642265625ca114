#pragma once

#include <array>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "dietsynth/analysis.hpp"

namespace dietsynth {

inline constexpr double kDefaultThreshold = 0.36;

/// Guards zero-width optimal ranges from producing a zero scale.
inline constexpr double kSigmaFloor = 0.5;

/// Per-group optimal intake band; midpoint and half-width feed the distance.
struct OptimalRange {
    std::string group;
    double lower = 0.0;
    double upper = 0.0;

    double midpoint() const { return (lower + upper) / 2.0; }
    double sigma() const { return std::max((upper - lower) / 2.0, kSigmaFloor); }
};

struct OptimalRanges {
    std::array<OptimalRange, kIntakeGroups> entries;

    static const OptimalRanges& standard();
    static OptimalRanges from_json(const nlohmann::json& doc);
    static OptimalRanges load_file(const std::filesystem::path& path);
};

/// Distance of an intake vector from the optimal-band midpoints under the
/// diagonal covariance diag(sigma_j^2):
///   MD = sqrt(sum_j ((x_j - mid_j) / sigma_j)^2).
/// The covariance the source formula writes as an outer product is rank-1 and
/// not invertible; the diagonal reading is the evidently intended one.
double mahalanobis(const IntakeVector& intake, const OptimalRanges& ranges);

struct NormalizeMode {
    enum class Kind { BatchMinMax, Reference };
    Kind kind = Kind::BatchMinMax;
    double md_ref = 0.0;

    static NormalizeMode batch() { return {Kind::BatchMinMax, 0.0}; }
    static NormalizeMode reference(double md_ref) { return {Kind::Reference, md_ref}; }
};

/// Maps distances into [0,1]. BatchMinMax: (md - min) / (max - min) over the
/// batch, all zero when the batch is constant; requires >= 2 values.
/// Reference: min(md / md_ref, 1), scoring single diets online.
std::vector<double> normalize(std::span<const double> mds, NormalizeMode mode);

/// healthy = 1 - nmd. Throws ConfigError outside [0,1].
double healthy_score(double nmd);

enum class DietClass : uint8_t { Healthy, Unhealthy };

std::string_view to_string(DietClass c);

/// Healthy iff score strictly exceeds the threshold.
DietClass classify(double score, double threshold = kDefaultThreshold);

struct ScoreRecord {
    std::string subject_id;
    int week = 0;
    double md = 0.0;
    double nmd = 0.0;
    double healthy_score = 0.0;
    DietClass predicted = DietClass::Unhealthy;
    ProfileType actual = ProfileType::Healthy;
};

struct ConfusionCounts {
    long long tp = 0; // actual Healthy, predicted Healthy
    long long fn = 0; // actual Healthy, predicted Unhealthy
    long long fp = 0; // actual Medium/Unhealthy, predicted Healthy
    long long tn = 0; // actual Medium/Unhealthy, predicted Unhealthy

    long long total() const { return tp + fn + fp + tn; }
};

struct EvalReport {
    ConfusionCounts confusion;
    double accuracy = 0.0;    // (TP+TN) / total
    double sensitivity = 0.0; // TP / (TP+FN), Healthy is the positive class
    double threshold = kDefaultThreshold;
};

EvalReport evaluate_counts(const ConfusionCounts& counts, double threshold);

/// Binary evaluation with Medium collapsed into Unhealthy. Predictions are
/// re-derived from each record's healthy score at the given threshold.
/// Records with actual == Variable must be excluded upstream and are ignored.
EvalReport evaluate(std::span<const ScoreRecord> records, double threshold = kDefaultThreshold);

/// Accuracy-maximising threshold over the scores present in `records`
/// (midpoints between adjacent distinct scores); ties prefer the higher
/// sensitivity, then the lower threshold.
EvalReport sweep_best_threshold(std::span<const ScoreRecord> records);

} // namespace dietsynth
