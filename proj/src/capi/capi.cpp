#include "seqdiag.h"

#include "common/error.hpp"
#include "core/dataset_io.hpp"
#include "pipeline/pipeline.hpp"

#include <cstring>
#include <string>

using namespace seqdiag;

struct seqdiag_dataset {
    Dataset data;
};

struct seqdiag_model {
    model::TsModel ts_model;
    std::string manifest;
};

namespace {

thread_local std::string g_last_error;

// The C codes mirror Status values one-to-one.
static_assert(static_cast<int>(Status::InvalidArgument) == SEQDIAG_ERR_INVALID_ARGUMENT);
static_assert(static_cast<int>(Status::UnknownSubtype) == SEQDIAG_ERR_UNKNOWN_SUBTYPE);
static_assert(static_cast<int>(Status::DecodeError) == SEQDIAG_ERR_DECODE);
static_assert(static_cast<int>(Status::Internal) == SEQDIAG_ERR_INTERNAL);

char* dup_string(const std::string& s) {
    char* out = new char[s.size() + 1];
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

template <typename Fn>
seqdiag_status guarded(Fn&& fn) {
    try {
        fn();
        g_last_error.clear();
        return SEQDIAG_OK;
    } catch (const Error& e) {
        g_last_error = e.what();
        return static_cast<seqdiag_status>(static_cast<int>(e.status()));
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return SEQDIAG_ERR_INTERNAL;
    }
}

seqdiag_status require(bool condition, const char* what) {
    if (condition) return SEQDIAG_OK;
    g_last_error = what;
    return SEQDIAG_ERR_INVALID_ARGUMENT;
}

pipe::PipelineConfig parse_config(const char* config_json) {
    if (!config_json || !*config_json) return pipe::PipelineConfig{};
    return pipe::PipelineConfig::from_json(config_json);
}

} // namespace

extern "C" {

const char* seqdiag_version(void) {
    return "0.1.0";
}

const char* seqdiag_status_name(seqdiag_status status) {
    return status_name(static_cast<Status>(static_cast<int>(status)));
}

const char* seqdiag_last_error(void) {
    return g_last_error.c_str();
}

void seqdiag_string_free(char* s) {
    delete[] s;
}

seqdiag_status seqdiag_simulate(const char* config_json, seqdiag_dataset** out) {
    if (auto rc = require(out != nullptr, "out must not be null")) return rc;
    return guarded([&] {
        auto cfg = parse_config(config_json);
        *out = new seqdiag_dataset{pipe::run_simulate(cfg)};
    });
}

seqdiag_status seqdiag_dataset_load(const char* path, seqdiag_dataset** out) {
    if (auto rc = require(path && out, "path and out must not be null")) return rc;
    return guarded([&] { *out = new seqdiag_dataset{load_dataset(path)}; });
}

seqdiag_status seqdiag_dataset_save(const seqdiag_dataset* dataset, const char* path) {
    if (auto rc = require(dataset && path, "dataset and path must not be null")) return rc;
    return guarded([&] { save_dataset(dataset->data, path); });
}

size_t seqdiag_dataset_students(const seqdiag_dataset* dataset) {
    return dataset ? dataset->data.size() : 0;
}

void seqdiag_dataset_free(seqdiag_dataset* dataset) {
    delete dataset;
}

seqdiag_status seqdiag_curate(const seqdiag_dataset* dataset, const char* config_json,
                              seqdiag_dataset** kept_out, char** cluster_csv_out,
                              char** summary_json_out) {
    if (auto rc = require(dataset && kept_out, "dataset and kept_out must not be null"))
        return rc;
    return guarded([&] {
        auto cfg = parse_config(config_json);
        pipe::CurateResult result = pipe::run_curate(dataset->data, cfg);
        *kept_out = new seqdiag_dataset{std::move(result.kept)};
        if (cluster_csv_out) *cluster_csv_out = dup_string(result.cluster_csv);
        if (summary_json_out) *summary_json_out = dup_string(result.summary_json);
    });
}

seqdiag_status seqdiag_train(const seqdiag_dataset* dataset, const char* config_json,
                             const char* checkpoint_path, char** history_csv_out,
                             char** summary_json_out) {
    if (auto rc = require(dataset && checkpoint_path,
                          "dataset and checkpoint_path must not be null"))
        return rc;
    return guarded([&] {
        auto cfg = parse_config(config_json);
        pipe::TrainOutput result = pipe::run_train(dataset->data, cfg, checkpoint_path);
        if (history_csv_out) *history_csv_out = dup_string(result.history_csv);
        if (summary_json_out) *summary_json_out = dup_string(result.summary_json);
    });
}

seqdiag_status seqdiag_model_load(const char* checkpoint_path, seqdiag_model** out) {
    if (auto rc = require(checkpoint_path && out,
                          "checkpoint_path and out must not be null"))
        return rc;
    return guarded([&] {
        std::string manifest;
        model::TsModel loaded = model::TsModel::load(checkpoint_path, &manifest);
        *out = new seqdiag_model{std::move(loaded), std::move(manifest)};
    });
}

void seqdiag_model_free(seqdiag_model* model) {
    delete model;
}

seqdiag_status seqdiag_evaluate(const char* checkpoint_path,
                                const seqdiag_dataset* dataset, char** csv_out,
                                char** table_out, char** summary_json_out) {
    if (auto rc = require(checkpoint_path && dataset,
                          "checkpoint_path and dataset must not be null"))
        return rc;
    return guarded([&] {
        pipe::EvalOutput result = pipe::run_evaluate(checkpoint_path, dataset->data);
        if (csv_out) *csv_out = dup_string(result.csv);
        if (table_out) *table_out = dup_string(result.table);
        if (summary_json_out) *summary_json_out = dup_string(result.summary_json);
    });
}

seqdiag_status seqdiag_ablate(const seqdiag_dataset* dataset, const char* config_json,
                              char** csv_out, char** table_out) {
    if (auto rc = require(dataset != nullptr, "dataset must not be null")) return rc;
    return guarded([&] {
        auto cfg = parse_config(config_json);
        pipe::AblateOutput result = pipe::run_ablate(dataset->data, cfg);
        if (csv_out) *csv_out = dup_string(result.csv);
        if (table_out) *table_out = dup_string(result.table);
    });
}

seqdiag_status seqdiag_agent_eval(const char* checkpoint_path,
                                  const seqdiag_dataset* dataset,
                                  const char* config_json, char** csv_out,
                                  char** table_out, char** summary_json_out) {
    if (auto rc = require(checkpoint_path && dataset,
                          "checkpoint_path and dataset must not be null"))
        return rc;
    return guarded([&] {
        auto cfg = parse_config(config_json);
        pipe::AgentEvalOutput result =
            pipe::run_agent_eval(checkpoint_path, dataset->data, cfg);
        if (csv_out) *csv_out = dup_string(result.csv);
        if (table_out) *table_out = dup_string(result.table);
        if (summary_json_out) *summary_json_out = dup_string(result.summary_json);
    });
}

seqdiag_status seqdiag_diagnose(const char* checkpoint_path,
                                const seqdiag_dataset* dataset,
                                const char* student_id, int attempt_index,
                                const char* config_json, char** diagnosis_json_out) {
    if (auto rc = require(checkpoint_path && dataset && student_id && diagnosis_json_out,
                          "checkpoint_path, dataset, student_id, and output must not be null"))
        return rc;
    return guarded([&] {
        auto cfg = parse_config(config_json);
        *diagnosis_json_out = dup_string(pipe::run_diagnose(
            checkpoint_path, dataset->data, student_id, attempt_index, cfg));
    });
}

} // extern "C"
