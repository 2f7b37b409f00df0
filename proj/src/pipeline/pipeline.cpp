#include "pipeline/pipeline.hpp"

#include "common/error.hpp"
#include "common/rng.hpp"
#include "core/dataset_io.hpp"
#include "curate/kmeans.hpp"
#include "evalsuite/judge.hpp"
#include "evalsuite/metrics.hpp"
#include "tsmodel/features.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace seqdiag::pipe {

using ordered_json = nlohmann::ordered_json;

std::shared_ptr<model::EncoderProvider> ProviderConfig::make() const {
    return model::make_stub_provider(seed, mode, d_txt, d_img);
}

std::string ProviderConfig::to_json() const {
    ordered_json j;
    j["seed"] = seed;
    j["mode"] = mode == model::EncoderProvider::Mode::pooled ? "pooled" : "raw";
    j["d_txt"] = d_txt;
    j["d_img"] = d_img;
    return j.dump();
}

namespace {

ProviderConfig provider_from_json(const ordered_json& j) {
    ProviderConfig cfg;
    if (j.contains("seed")) cfg.seed = j["seed"].get<uint64_t>();
    if (j.contains("mode")) {
        std::string mode = j["mode"].get<std::string>();
        if (mode == "pooled")
            cfg.mode = model::EncoderProvider::Mode::pooled;
        else if (mode == "raw")
            cfg.mode = model::EncoderProvider::Mode::raw;
        else
            raise(Status::InvalidArgument, "provider mode must be pooled or raw");
    }
    if (j.contains("d_txt")) cfg.d_txt = j["d_txt"].get<int>();
    if (j.contains("d_img")) cfg.d_img = j["d_img"].get<int>();
    return cfg;
}

sim::CohortConfig cohort_from_json(const ordered_json& j) {
    sim::CohortConfig cfg;
    if (j.contains("n_students")) cfg.n_students = j["n_students"].get<int>();
    if (j.contains("min_attempts")) cfg.min_attempts = j["min_attempts"].get<int>();
    if (j.contains("max_attempts")) cfg.max_attempts = j["max_attempts"].get<int>();
    if (j.contains("zipf_s")) cfg.zipf_s = j["zipf_s"].get<double>();
    if (j.contains("seed")) cfg.seed = j["seed"].get<uint64_t>();
    if (j.contains("gap_days_range")) {
        auto range = j["gap_days_range"].get<std::vector<double>>();
        if (range.size() != 2)
            raise(Status::InvalidArgument, "gap_days_range must be [min, max]");
        cfg.gap_days_min = range[0];
        cfg.gap_days_max = range[1];
    }
    if (j.contains("repeat_bias")) cfg.repeat_bias = j["repeat_bias"].get<double>();
    if (j.contains("correction_decay"))
        cfg.correction_decay = j["correction_decay"].get<double>();
    if (j.contains("oversized_gap_prob"))
        cfg.oversized_gap_prob = j["oversized_gap_prob"].get<double>();
    if (j.contains("feature_sigma")) cfg.feature_sigma = j["feature_sigma"].get<double>();
    if (j.contains("subtype_concentration"))
        cfg.subtype_concentration = j["subtype_concentration"].get<double>();
    cfg.validate();
    return cfg;
}

train::TrainConfig train_from_json(const ordered_json& j) {
    train::TrainConfig cfg;
    if (j.contains("lr")) cfg.lr = j["lr"].get<double>();
    if (j.contains("max_epochs")) cfg.max_epochs = j["max_epochs"].get<int>();
    if (j.contains("patience")) cfg.patience = j["patience"].get<int>();
    if (j.contains("batch_size")) cfg.batch_size = j["batch_size"].get<int>();
    if (j.contains("seed")) cfg.seed = j["seed"].get<uint64_t>();
    if (j.contains("split")) {
        auto split = j["split"].get<std::vector<double>>();
        if (split.size() != 3)
            raise(Status::InvalidArgument, "split must be [train, val, test]");
        cfg.train_fraction = split[0];
        cfg.val_fraction = split[1];
        cfg.test_fraction = split[2];
    }
    if (j.contains("max_history")) cfg.max_history = j["max_history"].get<int>();
    if (j.contains("max_gap_days"))
        cfg.max_gap = static_cast<int64_t>(j["max_gap_days"].get<double>() *
                                           static_cast<double>(kSecondsPerDay));
    cfg.validate();
    return cfg;
}

CurateConfig curate_from_json(const ordered_json& j) {
    CurateConfig cfg;
    if (j.contains("rubric_threshold"))
        cfg.rubric_threshold = j["rubric_threshold"].get<int>();
    if (j.contains("dedup_threshold"))
        cfg.dedup_threshold = j["dedup_threshold"].get<double>();
    if (j.contains("kmeans_k")) cfg.kmeans_k = j["kmeans_k"].get<int>();
    if (j.contains("kmeans_seed")) cfg.kmeans_seed = j["kmeans_seed"].get<uint64_t>();
    if (j.contains("per_cluster")) cfg.per_cluster = j["per_cluster"].get<int>();
    if (j.contains("per_category")) cfg.per_category = j["per_category"].get<int>();
    if (j.contains("sample_seed")) cfg.sample_seed = j["sample_seed"].get<uint64_t>();
    if (j.contains("scores_csv")) cfg.scores_csv = j["scores_csv"].get<std::string>();
    return cfg;
}

AgentConfig agent_from_json(const ordered_json& j) {
    AgentConfig cfg;
    if (j.contains("client")) cfg.client = j["client"].get<std::string>();
    if (j.contains("client_url")) cfg.client_url = j["client_url"].get<std::string>();
    if (j.contains("client_model"))
        cfg.client_model = j["client_model"].get<std::string>();
    if (j.contains("seed")) cfg.seed = j["seed"].get<uint64_t>();
    if (j.contains("conditions")) cfg.conditions = j["conditions"].get<std::string>();
    if (j.contains("include_confidence"))
        cfg.include_confidence = j["include_confidence"].get<bool>();
    if (j.contains("judge")) cfg.judge = j["judge"].get<std::string>();
    if (j.contains("transcript")) cfg.transcript_path = j["transcript"].get<std::string>();
    if (cfg.conditions != "both" && cfg.conditions != "with" && cfg.conditions != "without")
        raise(Status::InvalidArgument, "agent conditions must be both, with, or without");
    return cfg;
}

} // namespace

PipelineConfig PipelineConfig::from_json(const std::string& text) {
    ordered_json j = ordered_json::parse(text, nullptr, false);
    if (j.is_discarded()) raise(Status::DecodeError, "malformed config JSON");

    PipelineConfig cfg;
    try {
        if (j.contains("cohort")) cfg.cohort = cohort_from_json(j["cohort"]);
        if (j.contains("provider")) cfg.provider = provider_from_json(j["provider"]);
        if (j.contains("model"))
            cfg.model = model::ModelConfig::from_json(j["model"].dump());
        if (j.contains("train")) cfg.train = train_from_json(j["train"]);
        if (j.contains("type_weight")) cfg.type_weight = j["type_weight"].get<bool>();
        if (j.contains("test_split_out"))
            cfg.test_split_out = j["test_split_out"].get<std::string>();
        if (j.contains("curate")) cfg.curate = curate_from_json(j["curate"]);
        if (j.contains("agent")) cfg.agent = agent_from_json(j["agent"]);
        if (j.contains("ablate") && j["ablate"].contains("grid"))
            cfg.ablate_grid = j["ablate"]["grid"].get<std::string>();
    } catch (const ordered_json::exception& e) {
        raise(Status::DecodeError, std::string("config: ") + e.what());
    }
    // The model must accept the provider's feature dimensions.
    cfg.model.d_txt = cfg.provider.d_txt;
    cfg.model.d_img = cfg.provider.d_img;
    return cfg;
}

PipelineConfig PipelineConfig::from_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(Status::IoError, "cannot open config: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return from_json(buffer.str());
}

Dataset run_simulate(const PipelineConfig& cfg) {
    return sim::sample_cohort(cfg.cohort);
}

curate::RubricScores stub_rubric_scores(const AttemptRecord& attempt) {
    Rng rng(fnv1a64(attempt.draft_ref) ^ fnv1a64(attempt.analysis_text) ^
            0x52554252494BULL);
    curate::RubricScores s;
    s.completeness = static_cast<int>(rng.uniform_int(31));
    s.layout = static_cast<int>(rng.uniform_int(26));
    s.correctness = static_cast<int>(rng.uniform_int(21));
    s.logic = static_cast<int>(rng.uniform_int(16));
    s.units = static_cast<int>(rng.uniform_int(6));
    s.calculation = static_cast<int>(rng.uniform_int(6));
    return s;
}

namespace {

struct FlatRecord {
    size_t trajectory = 0;
    size_t attempt = 0;
};

std::map<std::string, curate::RubricScores> load_scores_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) raise(Status::IoError, "cannot open scores CSV: " + path);
    std::map<std::string, curate::RubricScores> scores;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line.rfind("draft_ref", 0) == 0) continue;
        std::istringstream row(line);
        std::string field;
        std::vector<std::string> fields;
        while (std::getline(row, field, ',')) fields.push_back(field);
        if (fields.size() != 7)
            raise(Status::DecodeError,
                  "scores CSV line " + std::to_string(line_no) + ": want 7 fields");
        curate::RubricScores s;
        try {
            s.completeness = std::stoi(fields[1]);
            s.layout = std::stoi(fields[2]);
            s.correctness = std::stoi(fields[3]);
            s.logic = std::stoi(fields[4]);
            s.units = std::stoi(fields[5]);
            s.calculation = std::stoi(fields[6]);
        } catch (const std::exception&) {
            raise(Status::DecodeError,
                  "scores CSV line " + std::to_string(line_no) + ": bad integer");
        }
        scores[fields[0]] = s;
    }
    return scores;
}

} // namespace

CurateResult run_curate(const Dataset& dataset, const PipelineConfig& cfg) {
    const CurateConfig& cc = cfg.curate;

    std::vector<FlatRecord> records;
    for (size_t ti = 0; ti < dataset.size(); ++ti)
        for (size_t ai = 0; ai < dataset[ti].attempts.size(); ++ai)
            records.push_back(FlatRecord{ti, ai});
    auto record_at = [&dataset](const FlatRecord& r) -> const AttemptRecord& {
        return dataset[r.trajectory].attempts[r.attempt];
    };

    // Rubric scoring, then threshold filtering.
    std::map<std::string, curate::RubricScores> provided;
    if (!cc.scores_csv.empty()) provided = load_scores_csv(cc.scores_csv);
    std::vector<int> scores;
    scores.reserve(records.size());
    for (const FlatRecord& r : records) {
        const AttemptRecord& a = record_at(r);
        auto it = provided.find(a.draft_ref);
        scores.push_back(curate::score_draft(it != provided.end() ? it->second
                                                                  : stub_rubric_scores(a)));
    }
    std::vector<size_t> after_filter = curate::filter_drafts(scores, cc.rubric_threshold);

    // Near-duplicate removal on problem text.
    std::vector<std::string> texts;
    texts.reserve(after_filter.size());
    for (size_t idx : after_filter) texts.push_back(record_at(records[idx]).problem_text);
    std::vector<size_t> after_dedup_local = curate::dedup_3gram(texts, cc.dedup_threshold);
    std::vector<size_t> after_dedup;
    after_dedup.reserve(after_dedup_local.size());
    for (size_t local : after_dedup_local) after_dedup.push_back(after_filter[local]);

    // Cluster content embeddings, then balance per cluster.
    auto provider = cfg.provider.make();
    std::vector<std::vector<double>> embeddings;
    embeddings.reserve(after_dedup.size());
    for (size_t idx : after_dedup)
        embeddings.push_back(provider->embed_text(
            model::attempt_text(record_at(records[idx]), /*include_label=*/false)));
    curate::ClusterAssignment assignment =
        curate::kmeans(embeddings, cc.kmeans_k, cc.kmeans_seed);

    std::ostringstream cluster_csv;
    cluster_csv << "index,cluster\n";
    for (size_t i = 0; i < after_dedup.size(); ++i)
        cluster_csv << after_dedup[i] << "," << assignment.labels[i] << "\n";

    std::vector<size_t> balanced_local = curate::sample_balanced(
        assignment.labels, cc.kmeans_k, cc.per_cluster, cc.sample_seed);
    std::vector<size_t> selected;
    selected.reserve(balanced_local.size());
    for (size_t local : balanced_local) selected.push_back(after_dedup[local]);

    // Optional per-category stage over labeled survivors.
    size_t per_category_selected = 0;
    if (cc.per_category > 0) {
        std::vector<size_t> labeled;
        std::vector<ErrorLabel> labels;
        for (size_t idx : selected) {
            if (const auto& label = record_at(records[idx]).label) {
                labeled.push_back(idx);
                labels.push_back(*label);
            }
        }
        std::vector<size_t> picked_local =
            curate::sample_per_category(labels, cc.per_category, cc.sample_seed);
        std::vector<size_t> picked;
        picked.reserve(picked_local.size());
        for (size_t local : picked_local) picked.push_back(labeled[local]);
        selected = std::move(picked);
        per_category_selected = selected.size();
    }

    // Rebuild trajectories containing only surviving attempts.
    std::vector<std::vector<bool>> keep(dataset.size());
    for (size_t ti = 0; ti < dataset.size(); ++ti)
        keep[ti].assign(dataset[ti].attempts.size(), false);
    for (size_t idx : selected)
        keep[records[idx].trajectory][records[idx].attempt] = true;

    CurateResult result;
    for (size_t ti = 0; ti < dataset.size(); ++ti) {
        StudentTrajectory t;
        t.student_id = dataset[ti].student_id;
        for (size_t ai = 0; ai < dataset[ti].attempts.size(); ++ai)
            if (keep[ti][ai]) t.attempts.push_back(dataset[ti].attempts[ai]);
        if (!t.attempts.empty()) result.kept.push_back(std::move(t));
    }
    result.cluster_csv = cluster_csv.str();

    ordered_json summary;
    summary["input_records"] = records.size();
    summary["after_rubric_filter"] = after_filter.size();
    summary["after_dedup"] = after_dedup.size();
    summary["clusters"] = cc.kmeans_k;
    summary["kmeans_iterations"] = assignment.iterations;
    summary["balanced_selected"] = balanced_local.size();
    if (cc.per_category > 0) summary["per_category_selected"] = per_category_selected;
    summary["output_records"] = selected.size();
    summary["output_students"] = result.kept.size();
    result.summary_json = summary.dump();
    return result;
}

namespace {

std::string history_to_csv(const std::vector<train::EpochStats>& history) {
    std::ostringstream out;
    out << "epoch,train_loss,val_loss,val_acc1,val_acc2\n";
    char buf[160];
    for (const train::EpochStats& e : history) {
        std::snprintf(buf, sizeof(buf), "%d,%.6f,%.6f,%.4f,%.4f", e.epoch, e.train_loss,
                      e.val_loss, e.val_acc1, e.val_acc2);
        out << buf << "\n";
    }
    return out.str();
}

ordered_json report_to_json(const eval::CategoryReport& report) {
    const Taxonomy& tax = Taxonomy::instance();
    ordered_json j;
    j["acc1"] = report.acc1;
    j["acc2"] = report.acc2;
    j["macro_avg"] = report.macro_avg;
    j["total"] = report.total;
    ordered_json per;
    for (int t = 0; t < Taxonomy::kNumTypes; ++t) {
        per[tax.type(t).name] = {
            {"count", report.per_type_count[static_cast<size_t>(t)]},
            {"accuracy", report.per_type_accuracy[static_cast<size_t>(t)]}};
    }
    j["per_type"] = per;
    return j;
}

struct LoadedModel {
    model::TsModel ts_model;
    ProviderConfig provider;
};

LoadedModel load_model(const std::string& checkpoint_path) {
    std::string manifest_text;
    model::TsModel ts_model = model::TsModel::load(checkpoint_path, &manifest_text);
    ordered_json manifest = ordered_json::parse(manifest_text, nullptr, false);
    if (manifest.is_discarded() || !manifest.contains("provider"))
        raise(Status::DecodeError, "checkpoint manifest lacks provider settings");
    ProviderConfig provider = provider_from_json(manifest["provider"]);
    return LoadedModel{std::move(ts_model), provider};
}

} // namespace

TrainOutput run_train(const Dataset& dataset, const PipelineConfig& cfg,
                      const std::string& checkpoint_path) {
    train::DatasetSplit split =
        train::split_dataset(dataset, cfg.train.train_fraction, cfg.train.val_fraction,
                             cfg.train.test_fraction, cfg.train.seed);
    if (!cfg.test_split_out.empty()) save_dataset(split.test, cfg.test_split_out);

    auto provider = cfg.provider.make();
    auto make_samples = [&](const Dataset& part) {
        std::vector<HistoryWindow> windows = train::build_windows(part, cfg.train.max_gap);
        train::truncate_history(windows, cfg.train.max_history);
        return train::featurize_windows(windows, *provider);
    };
    std::vector<train::Sample> train_samples = make_samples(split.train);
    std::vector<train::Sample> val_samples = make_samples(split.val);
    std::vector<train::Sample> test_samples = make_samples(split.test);

    model::ModelConfig model_cfg = cfg.model;
    if (cfg.type_weight)
        model_cfg.class_weights = train::compute_class_weights(train_samples);

    // Model init seed derives from the training seed so one --seed pins the run.
    model::TsModel ts_model(model_cfg, cfg.train.seed ^ 0x5EED5EEDULL);
    train::TrainResult trained =
        train::train_loop(ts_model, cfg.train, train_samples, val_samples);
    eval::CategoryReport test_report = eval::evaluate_model(ts_model, test_samples);

    ordered_json manifest;
    manifest["model"] = ordered_json::parse(model_cfg.to_json());
    manifest["provider"] = ordered_json::parse(cfg.provider.to_json());
    ordered_json train_meta;
    train_meta["lr"] = cfg.train.lr;
    train_meta["max_epochs"] = cfg.train.max_epochs;
    train_meta["patience"] = cfg.train.patience;
    train_meta["batch_size"] = cfg.train.batch_size;
    train_meta["seed"] = cfg.train.seed;
    train_meta["optimizer"] = "adam(0.9,0.999,1e-8)";
    train_meta["best_epoch"] = trained.best_epoch;
    train_meta["best_val_loss"] = trained.best_val_loss;
    manifest["train"] = train_meta;
    ts_model.save(checkpoint_path, manifest.dump());

    ordered_json summary;
    summary["best_epoch"] = trained.best_epoch;
    summary["best_val_loss"] = trained.best_val_loss;
    summary["epochs_run"] = trained.history.size();
    summary["train_windows"] = train_samples.size();
    summary["val_windows"] = val_samples.size();
    summary["test_windows"] = test_samples.size();
    summary["test"] = report_to_json(test_report);

    return TrainOutput{history_to_csv(trained.history), summary.dump()};
}

EvalOutput run_evaluate(const std::string& checkpoint_path, const Dataset& dataset) {
    LoadedModel loaded = load_model(checkpoint_path);
    auto provider = loaded.provider.make();
    std::vector<HistoryWindow> windows = train::build_windows(dataset);
    std::vector<train::Sample> samples = train::featurize_windows(windows, *provider);
    if (samples.empty()) raise(Status::NoValidWindows, "dataset yields no valid windows");
    eval::CategoryReport report = eval::evaluate_model(loaded.ts_model, samples);
    return EvalOutput{eval::category_report_csv(report),
                      eval::category_report_table(report),
                      report_to_json(report).dump()};
}

AblateOutput run_ablate(const Dataset& dataset, const PipelineConfig& cfg) {
    std::vector<eval::AblationVariant> variants =
        eval::make_grid(cfg.ablate_grid, cfg.model);
    std::vector<eval::AblationRow> rows =
        eval::run_ablation(variants, dataset, cfg.train, cfg.provider.seed,
                           cfg.train.seed ^ 0x5EED5EEDULL);
    return AblateOutput{eval::ablation_csv(rows), eval::ablation_table(rows)};
}

namespace {

std::shared_ptr<agents::ChatClient> make_client(const AgentConfig& cfg) {
    if (cfg.client == "http") {
        agents::HttpClientConfig http;
        http.url = cfg.client_url;
        http.model = cfg.client_model;
        return std::make_shared<agents::HttpChatClient>(http);
    }
    if (cfg.client == "stub:follow_hint")
        return agents::make_stub_client(agents::StubPolicy::follow_hint, cfg.seed);
    if (cfg.client == "stub:ignore_hint")
        return agents::make_stub_client(agents::StubPolicy::ignore_hint, cfg.seed);
    if (cfg.client.rfind("stub:fixed:", 0) == 0) {
        std::string spec_text = cfg.client.substr(std::string("stub:fixed:").size());
        size_t slash = spec_text.find('/');
        if (slash == std::string::npos)
            raise(Status::InvalidArgument, "fixed stub wants Type/Subtype");
        const Taxonomy& tax = Taxonomy::instance();
        auto type_id = tax.find_type(spec_text.substr(0, slash));
        auto subtype_id = tax.find_subtype(spec_text.substr(slash + 1));
        if (!type_id || !subtype_id)
            raise(Status::InvalidArgument, "fixed stub label not in taxonomy");
        return agents::make_fixed_client(tax.make_label(*type_id, *subtype_id));
    }
    raise(Status::InvalidArgument, "unknown client spec: " + cfg.client);
}

eval::Judge make_judge(const AgentConfig& cfg,
                       const std::shared_ptr<agents::ChatClient>& client) {
    if (cfg.judge == "fallback") return eval::Judge::fallback();
    if (cfg.judge == "http") return eval::Judge::external(client);
    raise(Status::InvalidArgument, "unknown judge spec: " + cfg.judge);
}

} // namespace

AgentEvalOutput run_agent_eval(const std::string& checkpoint_path,
                               const Dataset& dataset, const PipelineConfig& cfg) {
    LoadedModel loaded = load_model(checkpoint_path);
    auto provider = loaded.provider.make();
    std::vector<HistoryWindow> windows = train::build_windows(dataset);
    if (windows.empty()) raise(Status::NoValidWindows, "dataset yields no valid windows");

    auto client = make_client(cfg.agent);
    eval::Judge judge = make_judge(cfg.agent, client);

    std::vector<agents::AgentReportRow> rows;
    auto run_condition = [&](bool with_time_agent) {
        agents::OrchestratorConfig ocfg;
        ocfg.with_time_agent = with_time_agent;
        ocfg.include_confidence = cfg.agent.include_confidence;
        if (!cfg.agent.transcript_path.empty())
            ocfg.transcript_path = cfg.agent.transcript_path +
                                   (with_time_agent ? ".with.jsonl" : ".without.jsonl");
        agents::AgentReport report =
            agents::orchestrate(windows, &loaded.ts_model, provider.get(), *client,
                                judge, ocfg);
        rows.push_back(agents::AgentReportRow{
            with_time_agent ? "w. time agent" : "w/o time agent", client->describe(),
            report});
    };
    if (cfg.agent.conditions == "both" || cfg.agent.conditions == "without")
        run_condition(false);
    if (cfg.agent.conditions == "both" || cfg.agent.conditions == "with")
        run_condition(true);

    ordered_json summary = ordered_json::array();
    for (const agents::AgentReportRow& row : rows) {
        ordered_json r;
        r["condition"] = row.condition;
        r["client"] = row.client_name;
        r["acc_type"] = row.report.acc_type;
        r["acc_subtype"] = row.report.acc_subtype;
        r["reasoning_score"] = row.report.mean_reasoning_score;
        r["suggestion_score"] = row.report.mean_suggestion_score;
        if (row.report.adoption_rate) r["adoption_rate"] = *row.report.adoption_rate;
        r["samples"] = row.report.n_samples;
        r["failures"] = row.report.n_failures;
        r["repaired"] = row.report.n_repaired;
        summary.push_back(r);
    }
    return AgentEvalOutput{agents::agent_report_csv(rows), agents::agent_report_table(rows),
                           summary.dump()};
}

std::string run_diagnose(const std::string& checkpoint_path, const Dataset& dataset,
                         const std::string& student_id, int attempt_index,
                         const PipelineConfig& cfg) {
    const StudentTrajectory* trajectory = nullptr;
    for (const StudentTrajectory& t : dataset)
        if (t.student_id == student_id) trajectory = &t;
    if (!trajectory)
        raise(Status::InvalidArgument, "student not in dataset: " + student_id);

    LoadedModel loaded = load_model(checkpoint_path);
    auto provider = loaded.provider.make();
    HistoryWindow window = make_window(*trajectory, attempt_index);

    agents::TimeAgentOutput hint = agents::time_agent_predict(
        window, loaded.ts_model, *provider, cfg.agent.include_confidence);
    auto client = make_client(cfg.agent);
    std::string reply = client->complete(agents::build_prompt(window.query, hint));
    agents::Diagnosis diag = agents::parse_response(reply);
    diag.adopted_hint = diag.type_id == hint.prediction.type_id;

    const Taxonomy& tax = Taxonomy::instance();
    ordered_json j;
    j["student_id"] = student_id;
    j["query_index"] = attempt_index;
    ordered_json h;
    h["type"] = tax.type(hint.prediction.type_id).name;
    h["subtype"] = tax.subtype(hint.prediction.subtype_id).name;
    h["confidence"] = hint.prediction.confidence;
    j["time_agent"] = h;
    ordered_json d;
    d["type"] = tax.type(diag.type_id).name;
    d["subtype"] = tax.subtype(diag.subtype_id).name;
    d["thinking"] = diag.thinking;
    d["reason"] = diag.reason;
    d["suggestion"] = diag.suggestion;
    d["repaired_parent"] = diag.repaired_parent;
    d["adopted_hint"] = *diag.adopted_hint;
    j["diagnosis"] = d;
    return j.dump(2);
}

} // namespace seqdiag::pipe
