#include "evalsuite/ablation.hpp"

#include "common/error.hpp"

#include <cstdio>
#include <map>
#include <sstream>

namespace seqdiag::eval {

using model::EncoderProvider;
using model::HeadMode;
using model::ModelConfig;
using model::Pooling;

std::vector<AblationVariant> make_grid(const std::string& grid_name,
                                       const ModelConfig& base) {
    std::vector<AblationVariant> variants;
    auto push = [&variants](AblationVariant v) { variants.push_back(std::move(v)); };

    if (grid_name == "baseline" || grid_name == "all") {
        AblationVariant none{"baseline", "wo_sequential", base,
                             EncoderProvider::Mode::pooled, 0, false};
        AblationVariant full{"baseline", "full_history", base,
                             EncoderProvider::Mode::pooled, kMaxHistory, false};
        push(none);
        push(full);
    }
    if (grid_name == "modality" || grid_name == "all") {
        AblationVariant raw{"modality", "raw_encoder", base,
                            EncoderProvider::Mode::raw, kMaxHistory, false};
        AblationVariant pooled{"modality", "llm_pooling", base,
                               EncoderProvider::Mode::pooled, kMaxHistory, false};
        push(raw);
        push(pooled);
    }
    if (grid_name == "prenorm" || grid_name == "all") {
        // Norm matters when modality scales are badly conditioned, so this
        // grid runs on the raw encoder mode.
        AblationVariant off{"prenorm", "wo_norm", base, EncoderProvider::Mode::raw,
                            kMaxHistory, false};
        off.model_cfg.pre_norm = false;
        AblationVariant on{"prenorm", "w_norm", base, EncoderProvider::Mode::raw,
                           kMaxHistory, false};
        on.model_cfg.pre_norm = true;
        push(off);
        push(on);
    }
    if (grid_name == "typeweight" || grid_name == "all") {
        AblationVariant off{"typeweight", "wo_type_weight", base,
                            EncoderProvider::Mode::pooled, kMaxHistory, false};
        AblationVariant on{"typeweight", "w_type_weight", base,
                           EncoderProvider::Mode::pooled, kMaxHistory, true};
        push(off);
        push(on);
    }
    if (grid_name == "classifier" || grid_name == "all") {
        AblationVariant individual{"classifier", "individual", base,
                                   EncoderProvider::Mode::pooled, kMaxHistory, false};
        individual.model_cfg.head_mode = HeadMode::individual;
        individual.model_cfg.teacher_forcing = false;
        AblationVariant f_cond{"classifier", "f_conditioned", base,
                               EncoderProvider::Mode::pooled, kMaxHistory, false};
        f_cond.model_cfg.head_mode = HeadMode::f_conditioned;
        f_cond.model_cfg.teacher_forcing = false;
        AblationVariant i_cond{"classifier", "i_conditioned", base,
                               EncoderProvider::Mode::pooled, kMaxHistory, false};
        i_cond.model_cfg.head_mode = HeadMode::i_conditioned;
        i_cond.model_cfg.teacher_forcing = false;
        AblationVariant teacher{"classifier", "teacher_force", base,
                                EncoderProvider::Mode::pooled, kMaxHistory, false};
        teacher.model_cfg.head_mode = HeadMode::i_conditioned;
        teacher.model_cfg.teacher_forcing = true;
        push(individual);
        push(f_cond);
        push(i_cond);
        push(teacher);
    }
    if (grid_name == "pooling" || grid_name == "all") {
        for (Pooling p : {Pooling::last, Pooling::mean, Pooling::cls, Pooling::mean_cls}) {
            AblationVariant v{"pooling", model::pooling_name(p), base,
                              EncoderProvider::Mode::pooled, kMaxHistory, false};
            v.model_cfg.pooling = p;
            push(v);
        }
    }

    if (variants.empty())
        raise(Status::InvalidArgument, "unknown ablation grid: " + grid_name);
    return variants;
}

std::vector<AblationRow> run_ablation(const std::vector<AblationVariant>& variants,
                                      const Dataset& dataset,
                                      const train::TrainConfig& train_cfg,
                                      uint64_t provider_seed, uint64_t model_seed) {
    // Shared split and window set; variants differ only on the toggled axis.
    train::DatasetSplit split =
        train::split_dataset(dataset, train_cfg.train_fraction, train_cfg.val_fraction,
                             train_cfg.test_fraction, train_cfg.seed);
    const std::vector<HistoryWindow> train_windows =
        train::build_windows(split.train, train_cfg.max_gap);
    const std::vector<HistoryWindow> val_windows =
        train::build_windows(split.val, train_cfg.max_gap);
    const std::vector<HistoryWindow> test_windows =
        train::build_windows(split.test, train_cfg.max_gap);

    // Featurized sample sets cached per (provider mode, history truncation).
    std::map<std::pair<int, int>, std::array<std::vector<train::Sample>, 3>> cache;
    std::map<int, std::shared_ptr<EncoderProvider>> providers;

    std::vector<AblationRow> rows;
    for (const AblationVariant& variant : variants) {
        const int mode_key = static_cast<int>(variant.provider_mode);
        auto provider_it = providers.find(mode_key);
        if (provider_it == providers.end()) {
            auto provider = model::make_stub_provider(
                provider_seed, variant.provider_mode, variant.model_cfg.d_txt,
                variant.model_cfg.d_img);
            provider_it = providers.emplace(mode_key, std::move(provider)).first;
        }

        auto key = std::make_pair(mode_key, variant.max_history);
        auto cache_it = cache.find(key);
        if (cache_it == cache.end()) {
            auto truncated = [&](std::vector<HistoryWindow> windows) {
                train::truncate_history(windows, variant.max_history);
                return train::featurize_windows(windows, *provider_it->second);
            };
            std::array<std::vector<train::Sample>, 3> sets = {
                truncated(train_windows), truncated(val_windows),
                truncated(test_windows)};
            cache_it = cache.emplace(key, std::move(sets)).first;
        }
        const auto& [train_samples, val_samples, test_samples] = cache_it->second;

        model::ModelConfig cfg = variant.model_cfg;
        if (variant.use_class_weights)
            cfg.class_weights = train::compute_class_weights(train_samples);

        model::TsModel ts_model(cfg, model_seed);
        train::TrainResult trained =
            train::train_loop(ts_model, train_cfg, train_samples, val_samples);
        CategoryReport report = evaluate_model(ts_model, test_samples);

        rows.push_back(AblationRow{variant.group, variant.name, report.acc1, report.acc2,
                                   trained.best_epoch, trained.best_val_loss});
    }
    return rows;
}

std::string ablation_csv(const std::vector<AblationRow>& rows) {
    std::ostringstream out;
    out << "group,variant,acc1,acc2,best_epoch,best_val_loss\n";
    char buf[128];
    for (const AblationRow& r : rows) {
        std::snprintf(buf, sizeof(buf), "%.4f,%.4f,%d,%.6f", r.acc1, r.acc2,
                      r.best_epoch, r.best_val_loss);
        out << r.group << "," << r.variant << "," << buf << "\n";
    }
    return out.str();
}

std::string ablation_table(const std::vector<AblationRow>& rows) {
    std::ostringstream out;
    char line[160];
    std::snprintf(line, sizeof(line), "%-12s %-16s %8s %8s\n", "Group", "Variant",
                  "Acc1", "Acc2");
    out << line;
    for (const AblationRow& r : rows) {
        std::snprintf(line, sizeof(line), "%-12s %-16s %8.4f %8.4f\n", r.group.c_str(),
                      r.variant.c_str(), r.acc1, r.acc2);
        out << line;
    }
    return out.str();
}

} // namespace seqdiag::eval
