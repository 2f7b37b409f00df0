// Command-line front end. Links the seqdiag shared library and reaches the
// core only through the C API; flag parsing and config-file merging happen
// here, with flags winning over the config file.

#include <seqdiag.h>

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr int kExitData = 1;
constexpr int kExitUsage = 2;

[[noreturn]] void die(seqdiag_status status) {
    std::fprintf(stderr, "error: %s: %s\n", seqdiag_status_name(status),
                 seqdiag_last_error());
    std::exit(status == SEQDIAG_ERR_INVALID_ARGUMENT ? kExitUsage : kExitData);
}

void check(seqdiag_status status) {
    if (status != SEQDIAG_OK) die(status);
}

struct StringOut {
    char* value = nullptr;
    ~StringOut() { seqdiag_string_free(value); }
    std::string str() const { return value ? value : ""; }
};

struct DatasetHandle {
    seqdiag_dataset* handle = nullptr;
    ~DatasetHandle() { seqdiag_dataset_free(handle); }
};

ordered_json load_config_file(const std::string& path) {
    if (path.empty()) return ordered_json::object();
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        std::fprintf(stderr, "error: io_error: cannot open config: %s\n", path.c_str());
        std::exit(kExitData);
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    ordered_json j = ordered_json::parse(buffer.str(), nullptr, false);
    if (j.is_discarded()) {
        std::fprintf(stderr, "error: decode_error: malformed config JSON: %s\n",
                     path.c_str());
        std::exit(kExitData);
    }
    return j;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        std::fprintf(stderr, "error: io_error: cannot write: %s\n", path.c_str());
        std::exit(kExitData);
    }
    out << content;
}

void emit(const std::string& content, const std::string& path) {
    if (path.empty())
        std::cout << content;
    else
        write_file(path, content);
}

DatasetHandle load_dataset_or_die(const std::string& path) {
    DatasetHandle dataset;
    check(seqdiag_dataset_load(path.c_str(), &dataset.handle));
    return dataset;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sequential student-error diagnosis pipelines"};
    app.require_subcommand(1);

    std::string config_path;
    app.add_option("--config", config_path, "JSON configuration file")
        ->configurable(false);
    std::optional<uint64_t> seed;
    app.add_option("--seed", seed, "Override the subcommand's seed(s)");

    // simulate
    auto* cmd_simulate = app.add_subcommand("simulate", "Generate a synthetic cohort");
    std::string sim_out;
    cmd_simulate->add_option("--out", sim_out, "Output dataset (JSON-Lines)")->required();

    // curate
    auto* cmd_curate = app.add_subcommand(
        "curate", "Rubric filter, dedup, cluster, and balance a dataset");
    std::string cur_data, cur_out, cur_clusters, cur_summary;
    cmd_curate->add_option("--data", cur_data, "Input dataset")->required();
    cmd_curate->add_option("--out", cur_out, "Output dataset")->required();
    cmd_curate->add_option("--clusters", cur_clusters, "Cluster report CSV path");
    cmd_curate->add_option("--summary", cur_summary, "Stage summary JSON path");

    // train
    auto* cmd_train = app.add_subcommand("train", "Train the sequential classifier");
    std::string trn_data, trn_checkpoint, trn_history, trn_summary, trn_test_out;
    cmd_train->add_option("--data", trn_data, "Input dataset")->required();
    cmd_train->add_option("--checkpoint", trn_checkpoint, "Checkpoint output path")
        ->required();
    cmd_train->add_option("--history", trn_history, "Training history CSV path");
    cmd_train->add_option("--summary", trn_summary, "Summary JSON path");
    cmd_train->add_option("--test-out", trn_test_out, "Write the held-out test split");

    // evaluate
    auto* cmd_evaluate = app.add_subcommand("evaluate", "Per-category report");
    std::string evl_data, evl_checkpoint, evl_out, evl_summary;
    cmd_evaluate->add_option("--data", evl_data, "Input dataset")->required();
    cmd_evaluate->add_option("--checkpoint", evl_checkpoint, "Model checkpoint")
        ->required();
    cmd_evaluate->add_option("--out", evl_out, "Report CSV path");
    cmd_evaluate->add_option("--summary", evl_summary, "Report JSON path");

    // ablate
    auto* cmd_ablate = app.add_subcommand("ablate", "Design-grid comparison");
    std::string abl_data, abl_grid, abl_out;
    cmd_ablate->add_option("--data", abl_data, "Input dataset")->required();
    cmd_ablate->add_option("--grid", abl_grid,
                           "baseline|modality|prenorm|typeweight|classifier|pooling|all");
    cmd_ablate->add_option("--out", abl_out, "Report CSV path");

    // agent-eval
    auto* cmd_agent = app.add_subcommand("agent-eval", "Two-agent evaluation");
    std::string agt_data, agt_checkpoint, agt_out, agt_summary, agt_client_url,
        agt_conditions = "both", agt_transcript;
    cmd_agent->add_option("--data", agt_data, "Input dataset")->required();
    cmd_agent->add_option("--checkpoint", agt_checkpoint, "Model checkpoint")->required();
    cmd_agent->add_option("--out", agt_out, "Report CSV path");
    cmd_agent->add_option("--summary", agt_summary, "Report JSON path");
    cmd_agent->add_option("--client-url", agt_client_url,
                          "Chat endpoint URL (default: offline stub client)");
    cmd_agent
        ->add_option("--with-time-agent", agt_conditions,
                     "Conditions to run: both|with|without")
        ->check(CLI::IsMember({"both", "with", "without"}));
    cmd_agent->add_option("--transcript", agt_transcript, "Prompt/reply log prefix");

    // diagnose
    auto* cmd_diagnose = app.add_subcommand("diagnose", "Diagnose one attempt");
    std::string dgn_data, dgn_checkpoint, dgn_student, dgn_client_url;
    int dgn_index = 0;
    cmd_diagnose->add_option("--data", dgn_data, "Student dataset")->required();
    cmd_diagnose->add_option("--checkpoint", dgn_checkpoint, "Model checkpoint")
        ->required();
    cmd_diagnose->add_option("--student", dgn_student, "Student id")->required();
    cmd_diagnose->add_option("--index", dgn_index, "Attempt index to diagnose")
        ->required();
    cmd_diagnose->add_option("--client-url", dgn_client_url,
                             "Chat endpoint URL (default: offline stub client)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return 0; // --help
        std::ostringstream usage;
        usage << app.help();
        std::fprintf(stderr, "error: usage: %s\n%s", e.what(), usage.str().c_str());
        return kExitUsage;
    }

    ordered_json config = load_config_file(config_path);
    auto section = [&config](const char* name) -> ordered_json& {
        if (!config.contains(name) || !config[name].is_object())
            config[name] = ordered_json::object();
        return config[name];
    };

    if (app.got_subcommand(cmd_simulate)) {
        if (seed) section("cohort")["seed"] = *seed;
        seqdiag_dataset* dataset = nullptr;
        check(seqdiag_simulate(config.dump().c_str(), &dataset));
        DatasetHandle guard{dataset};
        check(seqdiag_dataset_save(dataset, sim_out.c_str()));
        std::printf("wrote %zu students to %s\n", seqdiag_dataset_students(dataset),
                    sim_out.c_str());
        return 0;
    }

    if (app.got_subcommand(cmd_curate)) {
        if (seed) {
            section("curate")["kmeans_seed"] = *seed;
            section("curate")["sample_seed"] = *seed;
        }
        DatasetHandle dataset = load_dataset_or_die(cur_data);
        seqdiag_dataset* kept = nullptr;
        StringOut clusters, summary;
        check(seqdiag_curate(dataset.handle, config.dump().c_str(), &kept,
                             &clusters.value, &summary.value));
        DatasetHandle guard{kept};
        check(seqdiag_dataset_save(kept, cur_out.c_str()));
        if (!cur_clusters.empty()) write_file(cur_clusters, clusters.str());
        if (!cur_summary.empty()) write_file(cur_summary, summary.str());
        std::printf("%s\n", summary.str().c_str());
        return 0;
    }

    if (app.got_subcommand(cmd_train)) {
        if (seed) section("train")["seed"] = *seed;
        if (!trn_test_out.empty()) config["test_split_out"] = trn_test_out;
        DatasetHandle dataset = load_dataset_or_die(trn_data);
        StringOut history, summary;
        check(seqdiag_train(dataset.handle, config.dump().c_str(),
                            trn_checkpoint.c_str(), &history.value, &summary.value));
        if (!trn_history.empty()) write_file(trn_history, history.str());
        if (!trn_summary.empty()) write_file(trn_summary, summary.str());
        std::printf("%s\n", summary.str().c_str());
        return 0;
    }

    if (app.got_subcommand(cmd_evaluate)) {
        DatasetHandle dataset = load_dataset_or_die(evl_data);
        StringOut csv, table, summary;
        check(seqdiag_evaluate(evl_checkpoint.c_str(), dataset.handle, &csv.value,
                               &table.value, &summary.value));
        emit(table.str(), "");
        if (!evl_out.empty()) write_file(evl_out, csv.str());
        if (!evl_summary.empty()) write_file(evl_summary, summary.str());
        return 0;
    }

    if (app.got_subcommand(cmd_ablate)) {
        if (seed) section("train")["seed"] = *seed;
        if (!abl_grid.empty()) section("ablate")["grid"] = abl_grid;
        DatasetHandle dataset = load_dataset_or_die(abl_data);
        StringOut csv, table;
        check(seqdiag_ablate(dataset.handle, config.dump().c_str(), &csv.value,
                             &table.value));
        emit(table.str(), "");
        if (!abl_out.empty()) write_file(abl_out, csv.str());
        return 0;
    }

    if (app.got_subcommand(cmd_agent)) {
        if (seed) section("agent")["seed"] = *seed;
        if (!agt_client_url.empty()) {
            section("agent")["client"] = "http";
            section("agent")["client_url"] = agt_client_url;
        }
        section("agent")["conditions"] = agt_conditions;
        if (!agt_transcript.empty()) section("agent")["transcript"] = agt_transcript;
        DatasetHandle dataset = load_dataset_or_die(agt_data);
        StringOut csv, table, summary;
        check(seqdiag_agent_eval(agt_checkpoint.c_str(), dataset.handle,
                                 config.dump().c_str(), &csv.value, &table.value,
                                 &summary.value));
        emit(table.str(), "");
        if (!agt_out.empty()) write_file(agt_out, csv.str());
        if (!agt_summary.empty()) write_file(agt_summary, summary.str());
        return 0;
    }

    if (app.got_subcommand(cmd_diagnose)) {
        if (seed) section("agent")["seed"] = *seed;
        if (!dgn_client_url.empty()) {
            section("agent")["client"] = "http";
            section("agent")["client_url"] = dgn_client_url;
        }
        DatasetHandle dataset = load_dataset_or_die(dgn_data);
        StringOut diagnosis;
        check(seqdiag_diagnose(dgn_checkpoint.c_str(), dataset.handle,
                               dgn_student.c_str(), dgn_index, config.dump().c_str(),
                               &diagnosis.value));
        std::printf("%s\n", diagnosis.str().c_str());
        return 0;
    }

    return kExitUsage;
}
