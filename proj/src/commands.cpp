#include "dietsynth/commands.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "dietsynth/errors.hpp"
#include "dietsynth/io.hpp"
#include "dietsynth/profiles.hpp"
#include "dietsynth/synthesis.hpp"

namespace dietsynth {

namespace {

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_json_file(const nlohmann::ordered_json& doc, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open for writing: " + path.string());
    out << doc.dump(2) << '\n';
}

nlohmann::ordered_json run_manifest_base(const std::string& command) {
    nlohmann::ordered_json doc;
    doc["command"] = command;
    doc["tool_version"] = std::string(kToolVersion);
    doc["created_at"] = utc_timestamp();
    return doc;
}

double round4(double v) { return std::round(v * 10000.0) / 10000.0; }

} // namespace

// ---------------------------------------------------------------------------
// generate
// ---------------------------------------------------------------------------

void cmd_generate(const GenerateOptions& options) {
    const FoodPool pool = FoodPool::load_file(options.manifest);
    const ProfileSet profiles = parse_profiles_file(options.config);
    const uint64_t manifest_hash = hash_file(options.manifest);
    const uint64_t profile_hash = hash_file(options.config);

    GenerationResult result =
        generate_dataset(profiles, pool, options.seed, options.weeks, manifest_hash);

    std::filesystem::create_directories(options.out_dir);
    const auto dataset_path = options.out_dir / "dataset.jsonl";
    write_dataset_jsonl(result.dataset, pool, dataset_path);

    nlohmann::ordered_json manifest = run_manifest_base("generate");
    manifest["seed"] = options.seed;
    manifest["weeks"] = options.weeks;
    manifest["inputs"] = {{"manifest", to_hex(manifest_hash)}, {"profiles", to_hex(profile_hash)}};
    manifest["outputs"] = {{"dataset.jsonl", to_hex(hash_file(dataset_path))}};
    manifest["counts"] = {{"subjects", result.specs.size()},
                          {"weekly_logs", result.dataset.logs.size()},
                          {"records", result.report.records},
                          {"meal_type_fallbacks", result.report.meal_type_fallbacks}};
    write_json_file(manifest, options.out_dir / "run_manifest.json");
}

// ---------------------------------------------------------------------------
// analyze
// ---------------------------------------------------------------------------

void cmd_analyze(const AnalyzeOptions& options) {
    const GroupMapping mapping =
        options.mapping ? GroupMapping::load_file(*options.mapping) : GroupMapping::standard();
    const std::vector<LabeledWeek> weeks = read_dataset_jsonl(options.dataset);

    std::vector<IntakeRow> rows;
    rows.reserve(weeks.size());
    for (const LabeledWeek& week : weeks) {
        IntakeRow row;
        row.subject_id = week.subject_id;
        row.profile_id = week.profile_id;
        row.week = week.week;
        row.ground_truth = week.ground_truth;
        row.intake = aggregate_week(week.records, mapping);
        rows.push_back(std::move(row));
    }
    write_intake_csv(rows, options.out_csv);

    nlohmann::ordered_json manifest = run_manifest_base("analyze");
    manifest["inputs"] = {{"dataset", to_hex(hash_file(options.dataset))}};
    if (options.mapping) manifest["inputs"]["mapping"] = to_hex(hash_file(*options.mapping));
    manifest["outputs"] = {
        {options.out_csv.filename().string(), to_hex(hash_file(options.out_csv))}};
    manifest["counts"] = {{"weeks", rows.size()}};
    write_json_file(manifest, options.out_csv.string() + ".run.json");
}

// ---------------------------------------------------------------------------
// score + evaluate
// ---------------------------------------------------------------------------

void cmd_score_evaluate(const ScoreOptions& options) {
    const OptimalRanges ranges =
        options.ranges ? OptimalRanges::load_file(*options.ranges) : OptimalRanges::standard();
    const std::vector<IntakeRow> rows = read_intake_csv(options.intakes);
    if (rows.empty()) throw ConfigError("intake file has no rows: " + options.intakes.string());

    std::vector<double> mds;
    mds.reserve(rows.size());
    for (const IntakeRow& row : rows) mds.push_back(mahalanobis(row.intake, ranges));
    const std::vector<double> nmds = normalize(mds, options.norm);

    std::vector<ScoreRecord> records;
    records.reserve(rows.size());
    for (size_t i = 0; i < rows.size(); ++i) {
        ScoreRecord r;
        r.subject_id = rows[i].subject_id;
        r.week = rows[i].week;
        r.md = mds[i];
        r.nmd = nmds[i];
        r.healthy_score = healthy_score(nmds[i]);
        r.predicted = classify(r.healthy_score, options.threshold);
        r.actual = rows[i].ground_truth;
        records.push_back(std::move(r));
    }
    write_scores_csv(records, options.out_scores);

    const EvalReport report = evaluate(records, options.threshold);
    const EvalReport best = sweep_best_threshold(records);

    nlohmann::ordered_json report_doc;
    report_doc["threshold"] = options.threshold;
    report_doc["confusion"] = {{"tp", report.confusion.tp},
                               {"fn", report.confusion.fn},
                               {"fp", report.confusion.fp},
                               {"tn", report.confusion.tn}};
    report_doc["accuracy"] = round4(report.accuracy);
    report_doc["sensitivity"] = round4(report.sensitivity);
    report_doc["evaluated_diets"] = report.confusion.total();
    report_doc["scored_diets"] = records.size();
    report_doc["best_threshold"] = {{"threshold", round4(best.threshold)},
                                    {"accuracy", round4(best.accuracy)},
                                    {"sensitivity", round4(best.sensitivity)}};
    write_json_file(report_doc, options.out_report);

    nlohmann::ordered_json manifest = run_manifest_base("score");
    manifest["inputs"] = {{"intakes", to_hex(hash_file(options.intakes))}};
    if (options.ranges) manifest["inputs"]["ranges"] = to_hex(hash_file(*options.ranges));
    manifest["outputs"] = {
        {options.out_scores.filename().string(), to_hex(hash_file(options.out_scores))},
        {options.out_report.filename().string(), to_hex(hash_file(options.out_report))}};
    write_json_file(manifest, options.out_scores.string() + ".run.json");
}

// ---------------------------------------------------------------------------
// plot-data
// ---------------------------------------------------------------------------

void cmd_plot_data(const PlotDataOptions& options) {
    std::vector<ScoreRecord> records = read_scores_csv(options.scores);
    if (records.empty()) throw DataError("scores file has no rows: " + options.scores.string());

    auto group_rank = [](ProfileType t) {
        switch (t) {
        case ProfileType::Healthy: return 0;
        case ProfileType::Medium: return 1;
        case ProfileType::Unhealthy: return 2;
        case ProfileType::Variable: return 3;
        }
        return 4;
    };
    std::stable_sort(records.begin(), records.end(),
                     [&](const ScoreRecord& a, const ScoreRecord& b) {
                         if (group_rank(a.actual) != group_rank(b.actual))
                             return group_rank(a.actual) < group_rank(b.actual);
                         if (a.subject_id != b.subject_id) return a.subject_id < b.subject_id;
                         return a.week < b.week;
                     });

    std::ofstream out(options.out_csv, std::ios::binary);
    if (!out) throw DataError("cannot open for writing: " + options.out_csv.string());
    out << "diet_index,healthy_score,group\n";
    for (size_t i = 0; i < records.size(); ++i) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.10g", records[i].healthy_score);
        out << i << ',' << buf << ',' << to_string(records[i].actual) << '\n';
    }
    out.close();

    nlohmann::ordered_json manifest = run_manifest_base("plot-data");
    manifest["inputs"] = {{"scores", to_hex(hash_file(options.scores))}};
    manifest["outputs"] = {
        {options.out_csv.filename().string(), to_hex(hash_file(options.out_csv))}};
    manifest["counts"] = {{"rows", records.size()}};
    write_json_file(manifest, options.out_csv.string() + ".run.json");
}

// ---------------------------------------------------------------------------
// CLI wiring
// ---------------------------------------------------------------------------

namespace {

NormalizeMode parse_norm_flag(const std::string& text) {
    if (text == "batch") return NormalizeMode::batch();
    if (text.rfind("reference:", 0) == 0) {
        const std::string value = text.substr(10);
        try {
            return NormalizeMode::reference(std::stod(value));
        } catch (const std::exception&) {
            throw ConfigError("invalid reference distance '" + value + "'");
        }
    }
    throw ConfigError("unknown normalisation mode '" + text + "' (use batch or reference:<md>)");
}

} // namespace

int run_cli(const std::vector<std::string>& args) {
    CLI::App app{"dietsynth: synthesise weekly eating-behaviour datasets and score them"};
    app.require_subcommand(1);

    GenerateOptions gen;
    auto* generate = app.add_subcommand("generate", "generate a dataset from profiles");
    generate->add_option("--config", gen.config, "profile set JSON")->required();
    generate->add_option("--manifest", gen.manifest, "food item manifest JSON")->required();
    generate->add_option("--seed", gen.seed, "master seed")->required();
    generate->add_option("--weeks", gen.weeks, "weeks per subject")->default_val(4);
    generate->add_option("--out", gen.out_dir, "output directory")->required();

    AnalyzeOptions ana;
    std::string mapping_path;
    auto* analyze = app.add_subcommand("analyze", "aggregate a dataset into intake vectors");
    analyze->add_option("--dataset", ana.dataset, "dataset JSONL")->required();
    analyze->add_option("--mapping", mapping_path, "group mapping JSON (default built-in)");
    analyze->add_option("--out", ana.out_csv, "output intake CSV")->required();

    ScoreOptions sco;
    std::string ranges_path, norm_text = "batch";
    auto* score = app.add_subcommand("score", "score intake vectors and evaluate");
    score->add_option("--intakes", sco.intakes, "intake CSV")->required();
    score->add_option("--ranges", ranges_path, "optimal ranges JSON (default built-in)");
    score->add_option("--norm", norm_text, "batch | reference:<md>")->default_val("batch");
    score->add_option("--threshold", sco.threshold, "healthy threshold")
        ->default_val(kDefaultThreshold);
    score->add_option("--out", sco.out_scores, "output scores CSV")->required();
    score->add_option("--report", sco.out_report, "output report JSON")->required();

    PlotDataOptions plot;
    auto* plot_data = app.add_subcommand("plot-data", "export scatter data from scores");
    plot_data->add_option("--scores", plot.scores, "scores CSV")->required();
    plot_data->add_option("--out", plot.out_csv, "output scatter CSV")->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (generate->parsed()) {
            cmd_generate(gen);
        } else if (analyze->parsed()) {
            if (!mapping_path.empty()) ana.mapping = mapping_path;
            cmd_analyze(ana);
        } else if (score->parsed()) {
            if (!ranges_path.empty()) sco.ranges = ranges_path;
            sco.norm = parse_norm_flag(norm_text);
            cmd_score_evaluate(sco);
        } else if (plot_data->parsed()) {
            cmd_plot_data(plot);
        }
        return kExitOk;
    } catch (const DataError& ex) {
        std::cerr << "data error: " << ex.what() << '\n';
        return kExitData;
    } catch (const ConfigError& ex) {
        std::cerr << "config error: " << ex.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << '\n';
        return kExitUnexpected;
    }
}

} // namespace dietsynth
