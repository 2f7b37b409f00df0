// Exercises the shared-library surface end to end: simulate -> save/load ->
// curate -> train -> evaluate -> agent-eval -> diagnose, plus error paths.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <seqdiag.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

namespace {

struct Str {
    char* v = nullptr;
    ~Str() { seqdiag_string_free(v); }
    std::string str() const { return v ? v : ""; }
};

std::string tmp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

const char* kSmallConfig = R"({
  "cohort": {"n_students": 14, "min_attempts": 21, "max_attempts": 23, "seed": 5,
             "repeat_bias": 0.9, "correction_decay": 1.0, "oversized_gap_prob": 0.0},
  "provider": {"seed": 9, "mode": "pooled", "d_txt": 24, "d_img": 24},
  "model": {"d_model": 16, "n_layers": 1, "n_heads": 2, "d_mlp": 32},
  "train": {"max_epochs": 2, "patience": 3, "seed": 3},
  "curate": {"kmeans_k": 4, "per_cluster": 50, "rubric_threshold": 50},
  "agent": {"client": "stub:follow_hint", "seed": 11, "conditions": "both"}
})";

} // namespace

TEST_CASE("status names and version are exposed") {
    CHECK(std::string(seqdiag_version()) == "0.1.0");
    CHECK(std::string(seqdiag_status_name(SEQDIAG_OK)) == "ok");
    CHECK(std::string(seqdiag_status_name(SEQDIAG_ERR_DECODE)) == "decode_error");
}

TEST_CASE("null arguments are rejected with a message") {
    CHECK(seqdiag_simulate("{}", nullptr) == SEQDIAG_ERR_INVALID_ARGUMENT);
    CHECK(std::string(seqdiag_last_error()).find("null") != std::string::npos);
    seqdiag_dataset* dataset = nullptr;
    CHECK(seqdiag_dataset_load(nullptr, &dataset) == SEQDIAG_ERR_INVALID_ARGUMENT);
}

TEST_CASE("bad paths and malformed configs map to status codes") {
    seqdiag_dataset* dataset = nullptr;
    CHECK(seqdiag_dataset_load("/nonexistent/path.jsonl", &dataset) == SEQDIAG_ERR_IO);
    CHECK(seqdiag_simulate("{not json", &dataset) == SEQDIAG_ERR_DECODE);
    CHECK(seqdiag_simulate(R"({"cohort": {"n_students": 0}})", &dataset) ==
          SEQDIAG_ERR_INVALID_ARGUMENT);
    CHECK(std::string(seqdiag_last_error()).size() > 0);
}

TEST_CASE("the full pipeline runs through the C surface") {
    seqdiag_dataset* dataset = nullptr;
    REQUIRE(seqdiag_simulate(kSmallConfig, &dataset) == SEQDIAG_OK);
    CHECK(seqdiag_dataset_students(dataset) == 14);

    // Round trip through disk.
    std::string data_path = tmp_path("seqdiag_capi_cohort.jsonl");
    REQUIRE(seqdiag_dataset_save(dataset, data_path.c_str()) == SEQDIAG_OK);
    seqdiag_dataset* reloaded = nullptr;
    REQUIRE(seqdiag_dataset_load(data_path.c_str(), &reloaded) == SEQDIAG_OK);
    CHECK(seqdiag_dataset_students(reloaded) == 14);

    // Curation produces a cluster report and a summary.
    seqdiag_dataset* kept = nullptr;
    Str clusters, curate_summary;
    REQUIRE(seqdiag_curate(reloaded, kSmallConfig, &kept, &clusters.v,
                           &curate_summary.v) == SEQDIAG_OK);
    CHECK(clusters.str().rfind("index,cluster", 0) == 0);
    CHECK(curate_summary.str().find("after_dedup") != std::string::npos);
    CHECK(seqdiag_dataset_students(kept) > 0);

    // Training writes a loadable checkpoint and reports history.
    std::string ckpt_path = tmp_path("seqdiag_capi_model.ckpt");
    Str history, train_summary;
    REQUIRE(seqdiag_train(reloaded, kSmallConfig, ckpt_path.c_str(), &history.v,
                          &train_summary.v) == SEQDIAG_OK);
    CHECK(history.str().rfind("epoch,train_loss,val_loss", 0) == 0);
    CHECK(train_summary.str().find("best_epoch") != std::string::npos);

    seqdiag_model* model = nullptr;
    REQUIRE(seqdiag_model_load(ckpt_path.c_str(), &model) == SEQDIAG_OK);
    seqdiag_model_free(model);

    // Evaluation renders a per-category table.
    Str eval_csv, eval_table, eval_summary;
    REQUIRE(seqdiag_evaluate(ckpt_path.c_str(), reloaded, &eval_csv.v, &eval_table.v,
                             &eval_summary.v) == SEQDIAG_OK);
    CHECK(eval_csv.str().rfind("category,count,accuracy", 0) == 0);
    CHECK(eval_table.str().find("Acc1") != std::string::npos);

    // Agent evaluation with the offline stub, both conditions.
    Str agent_csv, agent_table, agent_summary;
    REQUIRE(seqdiag_agent_eval(ckpt_path.c_str(), reloaded, kSmallConfig, &agent_csv.v,
                               &agent_table.v, &agent_summary.v) == SEQDIAG_OK);
    CHECK(agent_table.str().find("w. time agent") != std::string::npos);
    CHECK(agent_table.str().find("w/o time agent") != std::string::npos);

    // Diagnose one attempt of one student.
    Str diagnosis;
    REQUIRE(seqdiag_diagnose(ckpt_path.c_str(), reloaded, "s100003", 5, kSmallConfig,
                             &diagnosis.v) == SEQDIAG_OK);
    CHECK(diagnosis.str().find("\"diagnosis\"") != std::string::npos);
    CHECK(diagnosis.str().find("\"time_agent\"") != std::string::npos);

    CHECK(seqdiag_diagnose(ckpt_path.c_str(), reloaded, "no-such-student", 5,
                           kSmallConfig, &diagnosis.v) == SEQDIAG_ERR_INVALID_ARGUMENT);

    seqdiag_dataset_free(kept);
    seqdiag_dataset_free(reloaded);
    seqdiag_dataset_free(dataset);
    std::remove(data_path.c_str());
    std::remove(ckpt_path.c_str());
}

TEST_CASE("simulate is deterministic through the C surface") {
    seqdiag_dataset* a = nullptr;
    seqdiag_dataset* b = nullptr;
    REQUIRE(seqdiag_simulate(kSmallConfig, &a) == SEQDIAG_OK);
    REQUIRE(seqdiag_simulate(kSmallConfig, &b) == SEQDIAG_OK);

    std::string pa = tmp_path("seqdiag_capi_a.jsonl");
    std::string pb = tmp_path("seqdiag_capi_b.jsonl");
    REQUIRE(seqdiag_dataset_save(a, pa.c_str()) == SEQDIAG_OK);
    REQUIRE(seqdiag_dataset_save(b, pb.c_str()) == SEQDIAG_OK);

    std::ifstream fa(pa, std::ios::binary), fb(pb, std::ios::binary);
    std::string ca((std::istreambuf_iterator<char>(fa)), std::istreambuf_iterator<char>());
    std::string cb((std::istreambuf_iterator<char>(fb)), std::istreambuf_iterator<char>());
    CHECK(ca == cb);
    CHECK(!ca.empty());

    seqdiag_dataset_free(a);
    seqdiag_dataset_free(b);
    std::remove(pa.c_str());
    std::remove(pb.c_str());
}
