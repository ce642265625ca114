#include "dietsynth/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "dietsynth/errors.hpp"
#include "dietsynth/rng.hpp"

namespace dietsynth {

uint64_t hash_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open file for hashing: " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    const std::string bytes = buffer.str();
    return fnv1a64(bytes);
}

std::string to_hex(uint64_t value) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
    return buf;
}

// ---------------------------------------------------------------------------
// Dataset JSONL
// ---------------------------------------------------------------------------

void write_dataset_jsonl(const Dataset& dataset, const FoodPool& pool,
                         const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary); // binary: identical bytes on every platform
    if (!out) throw DataError("cannot open for writing: " + path.string());

    for (const WeeklyLog& log : dataset.logs) {
        for (const MealRecord& record : log.records) {
            const FoodItem* item = pool.find(record.item_id);
            if (item == nullptr)
                throw DataError("unknown item id '" + record.item_id + "' while writing dataset");
            nlohmann::ordered_json row;
            row["subject_id"] = log.subject_id;
            row["profile_id"] = log.profile_id;
            row["week"] = log.week;
            row["day"] = record.day;
            row["meal_index"] = record.meal_index;
            row["meal_type"] = std::string(to_string(record.meal_type));
            row["item_id"] = record.item_id;
            row["level"] = item->level;
            row["category"] = item->category;
            row["subcategory"] = item->subcategory;
            row["ground_truth"] = std::string(to_string(log.ground_truth));
            out << row.dump() << '\n';
        }
    }
}

std::vector<LabeledWeek> read_dataset_jsonl(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open dataset: " + path.string());

    std::vector<LabeledWeek> weeks;
    std::map<std::pair<std::string, int>, size_t> index;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        nlohmann::json row;
        try {
            row = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& ex) {
            throw DataError(path.string() + ":" + std::to_string(line_no) +
                            ": invalid JSON: " + ex.what());
        }
        try {
            const auto subject_id = row.at("subject_id").get<std::string>();
            const int week_no = row.at("week").get<int>();
            auto key = std::make_pair(subject_id, week_no);
            auto it = index.find(key);
            if (it == index.end()) {
                LabeledWeek week;
                week.subject_id = subject_id;
                week.profile_id = row.at("profile_id").get<std::string>();
                week.week = week_no;
                const auto truth = row.at("ground_truth").get<std::string>();
                auto type = profile_type_from_string(truth);
                if (!type)
                    throw DataError(path.string() + ":" + std::to_string(line_no) +
                                    ": unknown ground truth '" + truth + "'");
                week.ground_truth = *type;
                it = index.emplace(std::move(key), weeks.size()).first;
                weeks.push_back(std::move(week));
            }

            LabeledRecord rec;
            rec.record.day = row.at("day").get<int>();
            rec.record.meal_index = row.at("meal_index").get<int>();
            const auto meal_type = row.at("meal_type").get<std::string>();
            auto mt = meal_type_from_string(meal_type);
            if (!mt)
                throw DataError(path.string() + ":" + std::to_string(line_no) +
                                ": unknown meal type '" + meal_type + "'");
            rec.record.meal_type = *mt;
            rec.record.item_id = row.at("item_id").get<std::string>();
            rec.labels.level = row.at("level").get<int>();
            rec.labels.category = row.at("category").get<std::string>();
            rec.labels.subcategory = row.at("subcategory").get<std::string>();
            weeks[it->second].records.push_back(std::move(rec));
        } catch (const nlohmann::json::exception& ex) {
            throw DataError(path.string() + ":" + std::to_string(line_no) +
                            ": missing or mistyped field: " + ex.what());
        }
    }
    return weeks;
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

namespace {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

double parse_double(const std::string& s, const std::string& ctx) {
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw DataError(ctx + ": invalid number '" + s + "'");
    return value;
}

int parse_int(const std::string& s, const std::string& ctx) {
    int value = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw DataError(ctx + ": invalid integer '" + s + "'");
    return value;
}

} // namespace

void write_intake_csv(std::span<const IntakeRow> rows, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open for writing: " + path.string());
    out << "subject_id,profile_id,week";
    for (auto name : kGroupNames) out << ',' << name;
    out << ",ground_truth\n";
    for (const IntakeRow& row : rows) {
        out << row.subject_id << ',' << row.profile_id << ',' << row.week;
        for (double v : row.intake.values) out << ',' << format_double(v);
        out << ',' << to_string(row.ground_truth) << '\n';
    }
}

std::vector<IntakeRow> read_intake_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open intake file: " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw DataError("intake file is empty: " + path.string());

    std::vector<IntakeRow> rows;
    size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const std::string ctx = path.string() + ":" + std::to_string(line_no);
        const auto fields = split_csv_line(line);
        if (fields.size() != 4 + kIntakeGroups)
            throw DataError(ctx + ": expected " + std::to_string(4 + kIntakeGroups) +
                            " fields, got " + std::to_string(fields.size()));
        IntakeRow row;
        row.subject_id = fields[0];
        row.profile_id = fields[1];
        row.week = parse_int(fields[2], ctx);
        for (size_t g = 0; g < kIntakeGroups; ++g)
            row.intake.values[g] = parse_double(fields[3 + g], ctx);
        auto truth = profile_type_from_string(fields.back());
        if (!truth) throw DataError(ctx + ": unknown ground truth '" + fields.back() + "'");
        row.ground_truth = *truth;
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_scores_csv(std::span<const ScoreRecord> records, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open for writing: " + path.string());
    out << "subject_id,week,md,nmd,healthy_score,predicted,actual\n";
    for (const ScoreRecord& r : records) {
        out << r.subject_id << ',' << r.week << ',' << format_double(r.md) << ','
            << format_double(r.nmd) << ',' << format_double(r.healthy_score) << ','
            << to_string(r.predicted) << ',' << to_string(r.actual) << '\n';
    }
}

std::vector<ScoreRecord> read_scores_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open scores file: " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw DataError("scores file is empty: " + path.string());

    std::vector<ScoreRecord> records;
    size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const std::string ctx = path.string() + ":" + std::to_string(line_no);
        const auto fields = split_csv_line(line);
        if (fields.size() != 7)
            throw DataError(ctx + ": expected 7 fields, got " + std::to_string(fields.size()));
        ScoreRecord r;
        r.subject_id = fields[0];
        r.week = parse_int(fields[1], ctx);
        r.md = parse_double(fields[2], ctx);
        r.nmd = parse_double(fields[3], ctx);
        r.healthy_score = parse_double(fields[4], ctx);
        if (fields[5] == "Healthy") r.predicted = DietClass::Healthy;
        else if (fields[5] == "Unhealthy") r.predicted = DietClass::Unhealthy;
        else throw DataError(ctx + ": unknown predicted class '" + fields[5] + "'");
        auto actual = profile_type_from_string(fields[6]);
        if (!actual) throw DataError(ctx + ": unknown actual class '" + fields[6] + "'");
        r.actual = *actual;
        records.push_back(std::move(r));
    }
    return records;
}

} // namespace dietsynth
