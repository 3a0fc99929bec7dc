#include "wowbench/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "wowbench/aggregation.hpp"
#include "wowbench/calibration.hpp"
#include "wowbench/consistency.hpp"
#include "wowbench/errors.hpp"
#include "wowbench/ingest.hpp"
#include "wowbench/normalization.hpp"
#include "wowbench/plan.hpp"
#include "wowbench/registry.hpp"
#include "wowbench/trajectory.hpp"
#include "wowbench/version.hpp"

namespace wowbench {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

std::string to_string(ReportFormat f) {
    switch (f) {
        case ReportFormat::Csv: return "csv";
        case ReportFormat::Markdown: return "markdown";
        case ReportFormat::JsonLines: return "json-lines";
    }
    return "csv";
}

ReportFormat report_format_from_string(const std::string& s) {
    if (s == "csv") return ReportFormat::Csv;
    if (s == "markdown") return ReportFormat::Markdown;
    if (s == "json-lines") return ReportFormat::JsonLines;
    throw std::invalid_argument("unknown format '" + s + "' (expected csv|markdown|json-lines)");
}

void load_manifest(RunManifest& manifest, const std::string& manifest_path) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(read_text_file(manifest_path));
    } catch (const nlohmann::json::parse_error& e) {
        throw InputError(std::string("manifest parse error: ") + e.what(), manifest_path, manifest_path);
    }
    const fs::path base = fs::path(manifest_path).parent_path();
    auto resolve = [&](const ordered_json& value, const std::string& key) {
        if (!value.is_string()) {
            throw InputError("manifest key '" + key + "' must be a path string", manifest_path, key);
        }
        fs::path p(value.get<std::string>());
        if (p.is_relative()) p = base / p;
        return p.string();
    };
    for (const auto& [key, value] : doc.items()) {
        if (key == "records") {
            manifest.records_path = resolve(value, key);
        } else if (key == "trajectories") {
            if (value.contains("generated")) {
                manifest.trajectories_generated_path = resolve(value["generated"], "trajectories.generated");
            }
            if (value.contains("reference")) {
                manifest.trajectories_reference_path = resolve(value["reference"], "trajectories.reference");
            }
        } else if (key == "plans") {
            if (value.contains("predicted")) {
                manifest.plans_predicted_path = resolve(value["predicted"], "plans.predicted");
            }
            if (value.contains("ground_truth")) {
                manifest.plans_ground_truth_path = resolve(value["ground_truth"], "plans.ground_truth");
            }
        } else if (key == "embeddings") {
            manifest.embeddings_path = resolve(value, key);
        } else if (key == "frames") {
            manifest.frames_path = resolve(value, key);
        } else if (key == "ratings") {
            manifest.ratings_path = resolve(value, key);
        } else if (key == "frozen") {
            manifest.frozen_path = resolve(value, key);
        } else {
            throw InputError("unknown manifest key '" + key + "'", manifest_path, key);
        }
    }
}

namespace {

struct SampleKey {
    std::string model_id;
    std::string sample_id;
    auto operator<=>(const SampleKey&) const = default;
};

struct SampleInputs {
    const EvaluationRecord* record = nullptr;
    const TrajectoryDoc* trajectories = nullptr;
    const PlanDoc* plan = nullptr;
    const EmbeddingDoc* embeddings = nullptr;
    const FramesDoc* frames = nullptr;
};

struct SampleResult {
    std::map<std::string, double> metrics;
    std::vector<std::string> warnings;
};

struct LoadedRegistry {
    RegistryConfig registry;
    std::string registry_hash;
    std::string frozen_hash = "none";
};

LoadedRegistry load_registry_inputs(const RunManifest& manifest, std::vector<std::string>* warnings) {
    if (manifest.registry_path.empty()) {
        throw InputError("missing --registry", "", "registry");
    }
    LoadedRegistry loaded;
    const std::string registry_text = read_text_file(manifest.registry_path);
    loaded.registry = load_registry(registry_text, manifest.registry_path);
    loaded.registry_hash = fnv1a64_hex(registry_text);
    if (!manifest.frozen_path.empty()) {
        const std::string frozen_text = read_text_file(manifest.frozen_path);
        const auto results = parse_calibration_results(frozen_text, manifest.frozen_path);
        auto merge_warnings = apply_frozen_parameters(loaded.registry, results);
        if (warnings) {
            warnings->insert(warnings->end(), merge_warnings.begin(), merge_warnings.end());
        }
        loaded.frozen_hash = fnv1a64_hex(frozen_text);
    }
    return loaded;
}

// Bounded worker pool; each task writes only its own slot, so the collected
// output is ordered by task index regardless of completion order.
template <typename Fn>
void parallel_for(size_t count, Fn&& fn) {
    if (count == 0) return;
    const size_t workers =
        std::max<size_t>(1, std::min<size_t>(std::thread::hardware_concurrency(), count));
    std::vector<std::exception_ptr> errors(count);
    if (workers == 1) {
        for (size_t i = 0; i < count; ++i) {
            try {
                fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    } else {
        std::atomic<size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (;;) {
                    const size_t i = next.fetch_add(1);
                    if (i >= count) return;
                    try {
                        fn(i);
                    } catch (...) {
                        errors[i] = std::current_exception();
                    }
                }
            });
        }
        for (auto& t : pool) t.join();
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);  // first failing task wins
    }
}

std::string iso_timestamp() {
    const std::time_t now = std::time(nullptr);
    std::tm tm_utc{};
    gmtime_r(&now, &tm_utc);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buf;
}

std::string format_fixed2(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

// JSON has no literal for non-finite numbers; keep them explicit instead of
// nlohmann's silent null.
ordered_json json_number(double v) {
    if (std::isnan(v)) return nullptr;
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
}

void set_metric(std::map<std::string, double>& metrics, std::vector<std::string>& warnings,
                const SampleKey& key, const std::string& metric_id, double value) {
    auto [it, inserted] = metrics.emplace(metric_id, value);
    if (!inserted) {
        warnings.push_back("(" + key.model_id + ", " + key.sample_id + "): computed metric '" +
                           metric_id + "' overrides an ingested value");
        it->second = value;
    }
}

void compute_trajectory_metrics(const SampleKey& key, const TrajectoryDoc& generated,
                                const TrajectoryDoc* reference, const std::string& source,
                                std::map<std::string, double>& metrics,
                                std::vector<std::string>& warnings) {
    if (!reference) {
        warnings.push_back("(" + key.model_id + ", " + key.sample_id +
                           "): no reference trajectories; skipping");
        return;
    }
    double med_sum = 0, dtw_sum = 0, dtwn_sum = 0, frechet_sum = 0;
    int matched = 0;
    for (const auto& track : generated.tracks) {
        const Trajectory* ref = nullptr;
        for (const auto& candidate : reference->tracks) {
            if (candidate.track_id == track.track_id) {
                ref = &candidate;
                break;
            }
        }
        if (!ref) {
            warnings.push_back("(" + key.model_id + ", " + key.sample_id + "): track '" +
                               track.track_id + "' has no reference counterpart");
            continue;
        }
        try {
            const TrajectoryScore score = score_trajectory_pair(track, *ref);
            med_sum += score.med;
            dtw_sum += score.dtw_total;
            dtwn_sum += score.dtw_normalized;
            frechet_sum += score.frechet;
            ++matched;
        } catch (const std::invalid_argument& e) {
            throw InputError("(" + key.model_id + ", " + key.sample_id + ", track '" + track.track_id +
                                 "'): " + e.what(),
                             source, track.track_id);
        }
    }
    if (matched == 0) {
        warnings.push_back("(" + key.model_id + ", " + key.sample_id + "): no matched tracks");
        return;
    }
    // Unweighted mean over matched track ids.
    const double n = static_cast<double>(matched);
    set_metric(metrics, warnings, key, "traj_med", med_sum / n);
    set_metric(metrics, warnings, key, "traj_dtw_total", dtw_sum / n);
    set_metric(metrics, warnings, key, "traj_dtw_norm", dtwn_sum / n);
    set_metric(metrics, warnings, key, "traj_frechet", frechet_sum / n);
}

void compute_plan_metrics(const SampleKey& key, const PlanDoc& plan, const PlanDag* dag,
                          const std::string& source, std::map<std::string, double>& metrics,
                          std::vector<std::string>& warnings) {
    if (!dag) {
        warnings.push_back("(" + key.model_id + ", " + key.sample_id +
                           "): no ground-truth plan DAG; skipping");
        return;
    }
    try {
        const PlanScore score = score_plan(PredictedPlan{plan.steps}, *dag);
        set_metric(metrics, warnings, key, "plan_recall", score.recall);
        set_metric(metrics, warnings, key, "plan_sequential", score.sequential);
        set_metric(metrics, warnings, key, "plan_precision", score.precision);
        set_metric(metrics, warnings, key, "plan_score", score.s_plan);
    } catch (const std::invalid_argument& e) {
        throw InputError("(" + key.model_id + ", " + key.sample_id + "): " + e.what(), source,
                         key.sample_id);
    }
}

void compute_consistency_metrics(const SampleKey& key, const EmbeddingDoc& doc,
                                 const std::string& source, std::map<std::string, double>& metrics,
                                 std::vector<std::string>& warnings) {
    double adjacent_sum = 0, anchor_sum = 0;
    int count = 0;
    for (const auto& seq : doc.regions) {
        try {
            const double adjacent = regional_consistency(seq, ConsistencyMode::Adjacent);
            const double anchor = regional_consistency(seq, ConsistencyMode::AnchorFirst);
            set_metric(metrics, warnings, key, "consistency_" + to_string(seq.region), adjacent);
            set_metric(metrics, warnings, key, "consistency_" + to_string(seq.region) + "_anchor",
                       anchor);
            adjacent_sum += adjacent;
            anchor_sum += anchor;
            ++count;
        } catch (const std::invalid_argument& e) {
            throw InputError("(" + key.model_id + ", " + key.sample_id + ", region '" +
                                 to_string(seq.region) + "'): " + e.what(),
                             source, to_string(seq.region));
        }
    }
    if (count > 0) {
        set_metric(metrics, warnings, key, "consistency_mean", adjacent_sum / count);
        set_metric(metrics, warnings, key, "consistency_mean_anchor", anchor_sum / count);
    }
}

void compute_frame_metrics(const SampleKey& key, const FramesDoc& doc, const std::string& source,
                           std::map<std::string, double>& metrics,
                           std::vector<std::string>& warnings) {
    const std::string base_dir = fs::path(source).parent_path().string();
    std::vector<Frame> generated, reference;
    for (const auto& entry : doc.generated) {
        auto frames = read_frame_source(entry, base_dir);
        std::move(frames.begin(), frames.end(), std::back_inserter(generated));
    }
    for (const auto& entry : doc.reference) {
        auto frames = read_frame_source(entry, base_dir);
        std::move(frames.begin(), frames.end(), std::back_inserter(reference));
    }
    if (generated.size() != reference.size()) {
        throw InputError("(" + key.model_id + ", " + key.sample_id + "): " +
                             std::to_string(generated.size()) + " generated frames vs " +
                             std::to_string(reference.size()) + " reference frames",
                         source, key.sample_id);
    }
    if (generated.empty()) {
        warnings.push_back("(" + key.model_id + ", " + key.sample_id + "): empty frame entry");
        return;
    }
    double mse_sum = 0, ssim_sum = 0;
    for (size_t i = 0; i < generated.size(); ++i) {
        try {
            mse_sum += mse(reference[i], generated[i]);
            ssim_sum += ssim(reference[i], generated[i]);
        } catch (const std::invalid_argument& e) {
            throw InputError("(" + key.model_id + ", " + key.sample_id + ", frame " +
                                 std::to_string(i) + "): " + e.what(),
                             source, key.sample_id);
        }
    }
    const double n = static_cast<double>(generated.size());
    // Sequence PSNR pools the per-frame MSE, so a single identical frame does
    // not drive the sample mean to infinity.
    set_metric(metrics, warnings, key, "psnr", psnr_from_mse(mse_sum / n));
    set_metric(metrics, warnings, key, "ssim", ssim_sum / n);
}

struct ScoreComputation {
    std::vector<SampleKey> keys;
    std::vector<SampleResult> results;
    std::vector<std::string> warnings;
};

ScoreComputation compute_all_samples(const RunManifest& manifest, const RegistryConfig& registry) {
    ScoreComputation out;

    std::vector<EvaluationRecord> records;
    std::vector<TrajectoryDoc> gen_trajs, ref_trajs;
    std::vector<PlanDoc> plans;
    std::vector<DagDoc> dags;
    std::vector<EmbeddingDoc> embeddings;
    std::vector<FramesDoc> frames;

    if (!manifest.records_path.empty()) records = read_records(manifest.records_path);
    if (!manifest.trajectories_generated_path.empty()) {
        gen_trajs = read_trajectory_docs(manifest.trajectories_generated_path);
    }
    if (!manifest.trajectories_reference_path.empty()) {
        ref_trajs = read_trajectory_docs(manifest.trajectories_reference_path);
    }
    if (!manifest.plans_predicted_path.empty()) plans = read_plan_docs(manifest.plans_predicted_path);
    if (!manifest.plans_ground_truth_path.empty()) {
        dags = read_dag_docs(manifest.plans_ground_truth_path);
    }
    if (!manifest.embeddings_path.empty()) embeddings = read_embedding_docs(manifest.embeddings_path);
    if (!manifest.frames_path.empty()) frames = read_frames_docs(manifest.frames_path);

    std::map<std::string, const TrajectoryDoc*> ref_traj_by_sample;
    for (const auto& doc : ref_trajs) ref_traj_by_sample[doc.sample_id] = &doc;
    std::map<std::string, const PlanDag*> dag_by_sample;
    for (const auto& doc : dags) dag_by_sample[doc.sample_id] = &doc.dag;

    std::map<SampleKey, SampleInputs> inputs;
    for (const auto& r : records) {
        auto& slot = inputs[{r.model_id, r.sample_id}].record;
        if (slot) {
            out.warnings.push_back("duplicate record for (" + r.model_id + ", " + r.sample_id +
                                   "); the later line wins");
        }
        slot = &r;
    }
    for (const auto& d : gen_trajs) {
        if (d.model_id.empty()) {
            throw InputError("generated trajectory for sample '" + d.sample_id + "' needs a model_id",
                             manifest.trajectories_generated_path, d.sample_id);
        }
        inputs[{d.model_id, d.sample_id}].trajectories = &d;
    }
    for (const auto& d : plans) {
        if (d.model_id.empty()) {
            throw InputError("predicted plan for sample '" + d.sample_id + "' needs a model_id",
                             manifest.plans_predicted_path, d.sample_id);
        }
        inputs[{d.model_id, d.sample_id}].plan = &d;
    }
    for (const auto& d : embeddings) {
        if (d.model_id.empty()) {
            throw InputError("embeddings for sample '" + d.sample_id + "' need a model_id",
                             manifest.embeddings_path, d.sample_id);
        }
        inputs[{d.model_id, d.sample_id}].embeddings = &d;
    }
    for (const auto& d : frames) inputs[{d.model_id, d.sample_id}].frames = &d;

    out.keys.reserve(inputs.size());
    std::vector<const SampleInputs*> tasks;
    tasks.reserve(inputs.size());
    for (const auto& [key, value] : inputs) {
        out.keys.push_back(key);
        tasks.push_back(&value);
    }
    out.results.resize(tasks.size());

    parallel_for(tasks.size(), [&](size_t i) {
        const SampleKey& key = out.keys[i];
        const SampleInputs& in = *tasks[i];
        SampleResult& result = out.results[i];
        if (in.record) {
            auto record_warnings = validate_record(*in.record, registry);
            result.warnings.insert(result.warnings.end(), record_warnings.begin(),
                                   record_warnings.end());
            result.metrics = in.record->measurements;
        }
        if (in.trajectories) {
            const auto ref = ref_traj_by_sample.find(key.sample_id);
            compute_trajectory_metrics(key, *in.trajectories,
                                       ref == ref_traj_by_sample.end() ? nullptr : ref->second,
                                       manifest.trajectories_generated_path, result.metrics,
                                       result.warnings);
        }
        if (in.plan) {
            const auto dag = dag_by_sample.find(key.sample_id);
            compute_plan_metrics(key, *in.plan, dag == dag_by_sample.end() ? nullptr : dag->second,
                                 manifest.plans_predicted_path, result.metrics, result.warnings);
        }
        if (in.embeddings) {
            compute_consistency_metrics(key, *in.embeddings, manifest.embeddings_path, result.metrics,
                                        result.warnings);
        }
        if (in.frames) {
            compute_frame_metrics(key, *in.frames, manifest.frames_path, result.metrics,
                                  result.warnings);
        }
    });

    for (const auto& result : out.results) {
        out.warnings.insert(out.warnings.end(), result.warnings.begin(), result.warnings.end());
    }
    return out;
}

ordered_json meta_record(const LoadedRegistry& loaded, const RunManifest& manifest) {
    ordered_json meta;
    meta["record_type"] = "meta";
    meta["registry_hash"] = loaded.registry_hash;
    meta["frozen_hash"] = loaded.frozen_hash;
    meta["seed"] = manifest.seed;
    meta["folds"] = manifest.folds;
    return meta;
}

std::string csv_stamp(const LoadedRegistry& loaded, const RunManifest& manifest) {
    return "# registry=" + loaded.registry_hash + " frozen=" + loaded.frozen_hash +
           " seed=" + std::to_string(manifest.seed) + " folds=" + std::to_string(manifest.folds) +
           "\n";
}

void write_run_meta(const LoadedRegistry& loaded, const RunManifest& manifest,
                    const std::vector<std::string>& warnings, const std::string& command) {
    ordered_json meta;
    meta["generated_at"] = iso_timestamp();  // the only timestamp in any output
    meta["command"] = command;
    meta["tool_version"] = std::string(kVersion);
    meta["registry_hash"] = loaded.registry_hash;
    meta["frozen_hash"] = loaded.frozen_hash;
    meta["seed"] = manifest.seed;
    meta["folds"] = manifest.folds;
    meta["aggregation_mode"] = to_string(loaded.registry.aggregation_mode);
    meta["format"] = to_string(manifest.format);
    meta["warnings"] = warnings;
    write_text_file((fs::path(manifest.out_dir) / "run_meta.json").string(), meta.dump(2) + "\n");
}

void ensure_out_dir(const RunManifest& manifest) {
    if (manifest.out_dir.empty()) throw InputError("missing --out", "", "out");
    std::error_code ec;
    fs::create_directories(manifest.out_dir, ec);
    if (ec) throw InputError("cannot create output directory: " + ec.message(), manifest.out_dir, "out");
}

std::string render_leaderboard_csv(const std::vector<LeaderboardRow>& rows,
                                   const std::vector<std::string>& group_ids,
                                   const std::string& stamp) {
    std::ostringstream csv;
    csv << stamp;
    csv << "rank,model_id,overall";
    for (const auto& gid : group_ids) csv << "," << gid << "," << gid << "_n";
    csv << "\n";
    for (size_t i = 0; i < rows.size(); ++i) {
        csv << (i + 1) << "," << rows[i].model_id << "," << format_fixed2(rows[i].overall);
        for (const auto& gid : group_ids) {
            const auto it = rows[i].groups.find(gid);
            if (it != rows[i].groups.end() && it->second.value.has_value()) {
                csv << "," << format_fixed2(*it->second.value) << "," << it->second.available_count;
            } else {
                csv << ",,0";
            }
        }
        csv << "\n";
    }
    return csv.str();
}

std::string render_leaderboard_markdown(const std::vector<LeaderboardRow>& rows,
                                        const std::vector<std::string>& group_ids,
                                        const std::string& stamp_line) {
    // Best value per column gets bolded; ties bold every holder.
    std::map<std::string, double> best_group;
    double best_overall = -std::numeric_limits<double>::infinity();
    for (const auto& row : rows) {
        best_overall = std::max(best_overall, row.overall);
        for (const auto& gid : group_ids) {
            const auto it = row.groups.find(gid);
            if (it != row.groups.end() && it->second.value.has_value()) {
                auto [bit, inserted] = best_group.emplace(gid, *it->second.value);
                if (!inserted) bit->second = std::max(bit->second, *it->second.value);
            }
        }
    }
    std::ostringstream md;
    md << "| Rank | Model |";
    for (const auto& gid : group_ids) md << " " << gid << " |";
    md << " Overall |\n";
    md << "| --- | --- |";
    for (size_t i = 0; i < group_ids.size(); ++i) md << " --- |";
    md << " --- |\n";
    for (size_t i = 0; i < rows.size(); ++i) {
        md << "| " << (i + 1) << " | " << rows[i].model_id << " |";
        for (const auto& gid : group_ids) {
            const auto it = rows[i].groups.find(gid);
            if (it == rows[i].groups.end() || !it->second.value.has_value()) {
                md << " - |";
                continue;
            }
            const double v = *it->second.value;
            const std::string cell = format_fixed2(v);
            if (v == best_group[gid]) {
                md << " **" << cell << "** |";
            } else {
                md << " " << cell << " |";
            }
        }
        const std::string cell = format_fixed2(rows[i].overall);
        if (rows[i].overall == best_overall) {
            md << " **" << cell << "** |\n";
        } else {
            md << " " << cell << " |\n";
        }
    }
    md << "\n" << stamp_line << "\n";
    return md.str();
}

}  // namespace

void run_score(const RunManifest& manifest, std::ostream& diag) {
    ensure_out_dir(manifest);
    std::vector<std::string> warnings;
    const LoadedRegistry loaded = load_registry_inputs(manifest, &warnings);
    const RegistryConfig& registry = loaded.registry;

    ScoreComputation computed = compute_all_samples(manifest, registry);
    warnings.insert(warnings.end(), computed.warnings.begin(), computed.warnings.end());
    if (computed.keys.empty()) {
        warnings.push_back("no samples found in any input; leaderboard is empty");
    }

    // Per-model raw means over samples, then normalization of the mean.
    std::set<std::string> model_ids;
    for (const auto& key : computed.keys) model_ids.insert(key.model_id);

    struct MetricAggregate {
        double sum = 0.0;
        int count = 0;
    };
    std::map<std::string, std::map<std::string, MetricAggregate>> per_model;  // model -> metric -> agg
    for (size_t i = 0; i < computed.keys.size(); ++i) {
        const auto& key = computed.keys[i];
        for (const auto& [metric_id, value] : computed.results[i].metrics) {
            if (std::isnan(value)) continue;  // already warned by validate_record
            auto& agg = per_model[key.model_id][metric_id];
            agg.sum += value;
            agg.count += 1;
        }
    }

    std::map<std::string, double> weights;
    for (const auto& group : registry.groups) weights[group.group_id] = group.weight;

    std::ostringstream model_metrics_out;
    model_metrics_out << meta_record(loaded, manifest).dump() << "\n";
    std::vector<std::vector<GroupScore>> per_model_groups;
    std::vector<std::string> skipped_models;
    for (const auto& model_id : model_ids) {
        std::map<std::string, DesirabilityScore> scores;
        const auto model_it = per_model.find(model_id);
        if (model_it != per_model.end()) {
            for (const auto& [metric_id, agg] : model_it->second) {
                const MetricSpec* spec = registry.find_metric(metric_id);
                if (!spec || agg.count == 0) continue;
                const double raw_mean = agg.sum / static_cast<double>(agg.count);
                const DesirabilityScore score = desirability(raw_mean, *spec, registry.epsilon);
                scores[metric_id] = score;
                ordered_json line;
                line["model_id"] = model_id;
                line["metric_id"] = metric_id;
                line["raw_mean"] = json_number(raw_mean);
                line["prescaled"] = prescale(raw_mean, *spec);
                line["desirability"] = score.value;
                line["sample_count"] = agg.count;
                model_metrics_out << line.dump() << "\n";
            }
        }
        std::vector<GroupScore> groups;
        bool any_available = false;
        for (const auto& group : registry.groups) {
            GroupScore g = group_score(scores, group, model_id);
            any_available = any_available || g.value.has_value();
            groups.push_back(std::move(g));
        }
        if (!any_available && registry.aggregation_mode != AggregationMode::Sum) {
            warnings.push_back("model '" + model_id + "' has no scorable metric; excluded from leaderboard");
            skipped_models.push_back(model_id);
            continue;
        }
        per_model_groups.push_back(std::move(groups));
    }

    const std::vector<LeaderboardRow> rows =
        leaderboard(per_model_groups, weights, registry.aggregation_mode);

    std::vector<std::string> group_ids;
    for (const auto& group : registry.groups) group_ids.push_back(group.group_id);

    // sample_metrics.jsonl: the scored record stream, ordered by model then sample.
    std::ostringstream samples_out;
    samples_out << meta_record(loaded, manifest).dump() << "\n";
    for (size_t i = 0; i < computed.keys.size(); ++i) {
        ordered_json line;
        line["model_id"] = computed.keys[i].model_id;
        line["sample_id"] = computed.keys[i].sample_id;
        ordered_json metrics = ordered_json::object();
        for (const auto& [metric_id, value] : computed.results[i].metrics) {
            metrics[metric_id] = json_number(value);
        }
        line["metrics"] = std::move(metrics);
        samples_out << line.dump() << "\n";
    }
    write_text_file((fs::path(manifest.out_dir) / "sample_metrics.jsonl").string(), samples_out.str());
    write_text_file((fs::path(manifest.out_dir) / "model_metrics.jsonl").string(),
                    model_metrics_out.str());

    std::ostringstream board_out;
    board_out << meta_record(loaded, manifest).dump() << "\n";
    for (size_t i = 0; i < rows.size(); ++i) {
        const auto& row = rows[i];
        ordered_json line;
        line["rank"] = i + 1;
        line["model_id"] = row.model_id;
        line["overall"] = row.overall;
        ordered_json groups = ordered_json::object();
        for (const auto& gid : group_ids) {
            const auto it = row.groups.find(gid);
            ordered_json g;
            if (it != row.groups.end() && it->second.value.has_value()) {
                g["value"] = *it->second.value;
            } else {
                g["value"] = nullptr;
            }
            g["n"] = it != row.groups.end() ? it->second.available_count : 0;
            groups[gid] = std::move(g);
        }
        line["groups"] = std::move(groups);
        line["effective_weights"] = row.effective_weights;
        board_out << line.dump() << "\n";
    }
    write_text_file((fs::path(manifest.out_dir) / "leaderboard.jsonl").string(), board_out.str());
    write_text_file((fs::path(manifest.out_dir) / "leaderboard.csv").string(),
                    render_leaderboard_csv(rows, group_ids, csv_stamp(loaded, manifest)));
    if (manifest.format == ReportFormat::Markdown) {
        const std::string stamp = "_registry " + loaded.registry_hash + " · frozen " +
                                  loaded.frozen_hash + " · seed " + std::to_string(manifest.seed) +
                                  " · folds " + std::to_string(manifest.folds) + "_";
        write_text_file((fs::path(manifest.out_dir) / "leaderboard.md").string(),
                        render_leaderboard_markdown(rows, group_ids, stamp));
    }
    write_run_meta(loaded, manifest, warnings, "score");
    for (const auto& w : warnings) diag << "warning: " << w << "\n";
}

void run_calibrate(const RunManifest& manifest, std::ostream& diag) {
    ensure_out_dir(manifest);
    std::vector<std::string> warnings;
    LoadedRegistry loaded = load_registry_inputs(manifest, &warnings);
    const RegistryConfig& registry = loaded.registry;

    if (manifest.records_path.empty()) {
        throw InputError("calibrate needs a 'records' input in the manifest", manifest.records_path,
                         "records");
    }
    if (manifest.ratings_path.empty()) {
        throw InputError("calibrate needs a 'ratings' input in the manifest", manifest.ratings_path,
                         "ratings");
    }
    const auto records = read_records(manifest.records_path);
    const auto ratings = read_ratings(manifest.ratings_path);

    std::map<SampleKey, const EvaluationRecord*> record_index;
    for (const auto& r : records) record_index[{r.model_id, r.sample_id}] = &r;

    std::map<std::string, std::vector<CalibrationSample>> samples_by_metric;
    for (const auto& row : ratings) {
        const MetricSpec* spec = registry.find_metric(row.metric_id);
        if (!spec) {
            throw InputError("rating references unknown metric '" + row.metric_id + "'",
                             manifest.ratings_path, row.metric_id);
        }
        auto& samples = samples_by_metric[row.metric_id];  // rated even if no pair forms
        const auto rec = record_index.find({row.model_id, row.sample_id});
        if (rec == record_index.end()) {
            warnings.push_back("rating (" + row.model_id + ", " + row.sample_id + ", " + row.metric_id +
                               ") has no measurement record");
            continue;
        }
        const auto value = rec->second->measurements.find(row.metric_id);
        if (value == rec->second->measurements.end() || !std::isfinite(value->second)) {
            warnings.push_back("rating (" + row.model_id + ", " + row.sample_id + ", " + row.metric_id +
                               ") has no usable measurement");
            continue;
        }
        samples.push_back({prescale(value->second, *spec), row.rating});
    }
    if (samples_by_metric.empty()) {
        throw InputError("ratings file is empty", manifest.ratings_path, "ratings");
    }

    std::vector<CalibrationResult> results;
    for (const auto& [metric_id, samples] : samples_by_metric) {
        const MetricSpec* spec = registry.find_metric(metric_id);
        if (samples.size() < 2 * static_cast<size_t>(manifest.folds)) {
            throw InputError("metric '" + metric_id + "' has " + std::to_string(samples.size()) +
                                 " paired samples, needs at least " +
                                 std::to_string(2 * manifest.folds),
                             manifest.ratings_path, metric_id);
        }
        try {
            CalibrationResult result = calibrate_metric(samples, spec->family,
                                                        default_grid(spec->family), manifest.folds,
                                                        manifest.seed, registry.epsilon);
            result.metric_id = metric_id;
            results.push_back(std::move(result));
        } catch (const std::invalid_argument& e) {
            throw InputError("metric '" + metric_id + "': " + e.what(), manifest.ratings_path,
                             metric_id);
        }
    }

    write_text_file((fs::path(manifest.out_dir) / "frozen_params.txt").string(),
                    serialize_calibration_results(results));
    write_run_meta(loaded, manifest, warnings, "calibrate");
    for (const auto& w : warnings) diag << "warning: " << w << "\n";
}

void run_traj(const RunManifest& manifest, std::ostream& diag) {
    ensure_out_dir(manifest);
    std::vector<std::string> warnings;
    const LoadedRegistry loaded = load_registry_inputs(manifest, &warnings);
    if (manifest.trajectories_generated_path.empty() || manifest.trajectories_reference_path.empty()) {
        throw InputError("traj needs 'trajectories.generated' and 'trajectories.reference'",
                         manifest.trajectories_generated_path, "trajectories");
    }
    const auto generated = read_trajectory_docs(manifest.trajectories_generated_path);
    const auto reference = read_trajectory_docs(manifest.trajectories_reference_path);
    std::map<std::string, const TrajectoryDoc*> ref_by_sample;
    for (const auto& doc : reference) ref_by_sample[doc.sample_id] = &doc;

    std::vector<const TrajectoryDoc*> docs;
    for (const auto& doc : generated) docs.push_back(&doc);
    std::sort(docs.begin(), docs.end(), [](const TrajectoryDoc* a, const TrajectoryDoc* b) {
        return std::tie(a->model_id, a->sample_id) < std::tie(b->model_id, b->sample_id);
    });

    std::ostringstream out;
    out << meta_record(loaded, manifest).dump() << "\n";
    for (const TrajectoryDoc* doc : docs) {
        const SampleKey key{doc->model_id, doc->sample_id};
        const auto ref = ref_by_sample.find(doc->sample_id);
        if (ref == ref_by_sample.end()) {
            warnings.push_back("(" + key.model_id + ", " + key.sample_id +
                               "): no reference trajectories; skipping");
            continue;
        }
        ordered_json line;
        line["model_id"] = doc->model_id;
        line["sample_id"] = doc->sample_id;
        ordered_json tracks = ordered_json::object();
        double med_sum = 0, dtw_sum = 0, dtwn_sum = 0, frechet_sum = 0;
        int matched = 0;
        std::map<std::string, const Trajectory*> by_track;
        for (const auto& track : ref->second->tracks) by_track[track.track_id] = &track;
        for (const auto& track : doc->tracks) {
            const auto rt = by_track.find(track.track_id);
            if (rt == by_track.end()) {
                warnings.push_back("(" + key.model_id + ", " + key.sample_id + "): track '" +
                                   track.track_id + "' has no reference counterpart");
                continue;
            }
            TrajectoryScore score;
            try {
                score = score_trajectory_pair(track, *rt->second);
            } catch (const std::invalid_argument& e) {
                throw InputError("(" + key.model_id + ", " + key.sample_id + ", track '" +
                                     track.track_id + "'): " + e.what(),
                                 manifest.trajectories_generated_path, track.track_id);
            }
            ordered_json t;
            t["med"] = score.med;
            t["dtw_total"] = score.dtw_total;
            t["dtw_norm"] = score.dtw_normalized;
            t["frechet"] = score.frechet;
            tracks[track.track_id] = std::move(t);
            med_sum += score.med;
            dtw_sum += score.dtw_total;
            dtwn_sum += score.dtw_normalized;
            frechet_sum += score.frechet;
            ++matched;
        }
        line["tracks"] = std::move(tracks);
        if (matched > 0) {
            const double n = matched;
            ordered_json mean;
            mean["med"] = med_sum / n;
            mean["dtw_total"] = dtw_sum / n;
            mean["dtw_norm"] = dtwn_sum / n;
            mean["frechet"] = frechet_sum / n;
            line["mean"] = std::move(mean);
        } else {
            line["mean"] = nullptr;
        }
        out << line.dump() << "\n";
    }
    write_text_file((fs::path(manifest.out_dir) / "traj_scores.jsonl").string(), out.str());
    write_run_meta(loaded, manifest, warnings, "traj");
    for (const auto& w : warnings) diag << "warning: " << w << "\n";
}

void run_plan(const RunManifest& manifest, std::ostream& diag) {
    ensure_out_dir(manifest);
    std::vector<std::string> warnings;
    const LoadedRegistry loaded = load_registry_inputs(manifest, &warnings);
    if (manifest.plans_predicted_path.empty() || manifest.plans_ground_truth_path.empty()) {
        throw InputError("plan needs 'plans.predicted' and 'plans.ground_truth'",
                         manifest.plans_predicted_path, "plans");
    }
    const auto plans = read_plan_docs(manifest.plans_predicted_path);
    const auto dags = read_dag_docs(manifest.plans_ground_truth_path);
    std::map<std::string, const PlanDag*> dag_by_sample;
    for (const auto& doc : dags) dag_by_sample[doc.sample_id] = &doc.dag;

    std::vector<const PlanDoc*> docs;
    for (const auto& doc : plans) docs.push_back(&doc);
    std::sort(docs.begin(), docs.end(), [](const PlanDoc* a, const PlanDoc* b) {
        return std::tie(a->model_id, a->sample_id) < std::tie(b->model_id, b->sample_id);
    });

    std::ostringstream out;
    out << meta_record(loaded, manifest).dump() << "\n";
    for (const PlanDoc* doc : docs) {
        const auto dag = dag_by_sample.find(doc->sample_id);
        if (dag == dag_by_sample.end()) {
            warnings.push_back("(" + doc->model_id + ", " + doc->sample_id +
                               "): no ground-truth plan DAG; skipping");
            continue;
        }
        PlanScore score;
        try {
            score = score_plan(PredictedPlan{doc->steps}, *dag->second);
        } catch (const std::invalid_argument& e) {
            throw InputError("(" + doc->model_id + ", " + doc->sample_id + "): " + e.what(),
                             manifest.plans_predicted_path, doc->sample_id);
        }
        ordered_json line;
        line["model_id"] = doc->model_id;
        line["sample_id"] = doc->sample_id;
        line["recall"] = score.recall;
        line["sequential"] = score.sequential;
        line["precision"] = score.precision;
        line["plan_score"] = score.s_plan;
        out << line.dump() << "\n";
    }
    write_text_file((fs::path(manifest.out_dir) / "plan_scores.jsonl").string(), out.str());
    write_run_meta(loaded, manifest, warnings, "plan");
    for (const auto& w : warnings) diag << "warning: " << w << "\n";
}

void run_consistency(const RunManifest& manifest, std::ostream& diag) {
    ensure_out_dir(manifest);
    std::vector<std::string> warnings;
    const LoadedRegistry loaded = load_registry_inputs(manifest, &warnings);
    if (manifest.embeddings_path.empty()) {
        throw InputError("consistency needs an 'embeddings' input", manifest.embeddings_path,
                         "embeddings");
    }
    const auto docs_in = read_embedding_docs(manifest.embeddings_path);
    std::vector<const EmbeddingDoc*> docs;
    for (const auto& doc : docs_in) docs.push_back(&doc);
    std::sort(docs.begin(), docs.end(), [](const EmbeddingDoc* a, const EmbeddingDoc* b) {
        return std::tie(a->model_id, a->sample_id) < std::tie(b->model_id, b->sample_id);
    });

    std::ostringstream out;
    out << meta_record(loaded, manifest).dump() << "\n";
    for (const EmbeddingDoc* doc : docs) {
        ordered_json line;
        line["model_id"] = doc->model_id;
        line["sample_id"] = doc->sample_id;
        ordered_json regions = ordered_json::object();
        double adjacent_sum = 0, anchor_sum = 0;
        int count = 0;
        for (const auto& seq : doc->regions) {
            double adjacent = 0, anchor = 0;
            try {
                adjacent = regional_consistency(seq, ConsistencyMode::Adjacent);
                anchor = regional_consistency(seq, ConsistencyMode::AnchorFirst);
            } catch (const std::invalid_argument& e) {
                throw InputError("(" + doc->model_id + ", " + doc->sample_id + ", region '" +
                                     to_string(seq.region) + "'): " + e.what(),
                                 manifest.embeddings_path, to_string(seq.region));
            }
            ordered_json r;
            r["adjacent"] = adjacent;
            r["anchor_first"] = anchor;
            regions[to_string(seq.region)] = std::move(r);
            adjacent_sum += adjacent;
            anchor_sum += anchor;
            ++count;
        }
        line["regions"] = std::move(regions);
        if (count > 0) {
            ordered_json mean;
            mean["adjacent"] = adjacent_sum / count;
            mean["anchor_first"] = anchor_sum / count;
            line["mean"] = std::move(mean);
        } else {
            line["mean"] = nullptr;
        }
        out << line.dump() << "\n";
    }
    write_text_file((fs::path(manifest.out_dir) / "consistency_scores.jsonl").string(), out.str());
    write_run_meta(loaded, manifest, warnings, "consistency");
    for (const auto& w : warnings) diag << "warning: " << w << "\n";
}

}  // namespace wowbench
