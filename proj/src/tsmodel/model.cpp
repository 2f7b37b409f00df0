#include "tsmodel/model.hpp"

#include "common/error.hpp"
#include "common/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <functional>

namespace seqdiag::model {

using nn::Tape;
using nn::Tensor;
using ordered_json = nlohmann::ordered_json;

const char* pooling_name(Pooling p) {
    switch (p) {
    case Pooling::last: return "last";
    case Pooling::mean: return "mean";
    case Pooling::cls: return "cls";
    case Pooling::mean_cls: return "mean_cls";
    }
    return "?";
}

const char* head_mode_name(HeadMode m) {
    switch (m) {
    case HeadMode::individual: return "individual";
    case HeadMode::f_conditioned: return "f_conditioned";
    case HeadMode::i_conditioned: return "i_conditioned";
    }
    return "?";
}

Pooling pooling_from_name(const std::string& name) {
    for (Pooling p : {Pooling::last, Pooling::mean, Pooling::cls, Pooling::mean_cls})
        if (name == pooling_name(p)) return p;
    raise(Status::InvalidArgument, "unknown pooling: " + name);
}

HeadMode head_mode_from_name(const std::string& name) {
    for (HeadMode m :
         {HeadMode::individual, HeadMode::f_conditioned, HeadMode::i_conditioned})
        if (name == head_mode_name(m)) return m;
    raise(Status::InvalidArgument, "unknown head_mode: " + name);
}

void ModelConfig::validate() const {
    if (d_model < 1 || n_layers < 1 || n_heads < 1 || d_mlp < 1)
        raise(Status::InvalidArgument, "model dimensions must be positive");
    if (d_model % n_heads != 0)
        raise(Status::InvalidArgument, "d_model must be divisible by n_heads");
    if (d_txt < 1 || d_img < 1 || d_num < 1)
        raise(Status::InvalidArgument, "feature dimensions must be positive");
    if (class_weights && static_cast<int>(class_weights->size()) != Taxonomy::kNumTypes)
        raise(Status::InvalidArgument, "class_weights must have 9 entries");
}

std::string ModelConfig::to_json() const {
    ordered_json j;
    j["d_model"] = d_model;
    j["n_layers"] = n_layers;
    j["n_heads"] = n_heads;
    j["d_mlp"] = d_mlp;
    j["d_txt"] = d_txt;
    j["d_img"] = d_img;
    j["d_num"] = d_num;
    j["pooling"] = pooling_name(pooling);
    j["head_mode"] = head_mode_name(head_mode);
    j["teacher_forcing"] = teacher_forcing;
    j["pre_norm"] = pre_norm;
    if (class_weights) j["class_weights"] = *class_weights;
    return j.dump();
}

ModelConfig ModelConfig::from_json(const std::string& json_text) {
    ordered_json j = ordered_json::parse(json_text, nullptr, false);
    if (j.is_discarded())
        raise(Status::DecodeError, "malformed model config JSON");
    ModelConfig cfg;
    try {
        if (j.contains("d_model")) cfg.d_model = j["d_model"].get<int>();
        if (j.contains("n_layers")) cfg.n_layers = j["n_layers"].get<int>();
        if (j.contains("n_heads")) cfg.n_heads = j["n_heads"].get<int>();
        if (j.contains("d_mlp")) cfg.d_mlp = j["d_mlp"].get<int>();
        if (j.contains("d_txt")) cfg.d_txt = j["d_txt"].get<int>();
        if (j.contains("d_img")) cfg.d_img = j["d_img"].get<int>();
        if (j.contains("d_num")) cfg.d_num = j["d_num"].get<int>();
        if (j.contains("pooling"))
            cfg.pooling = pooling_from_name(j["pooling"].get<std::string>());
        if (j.contains("head_mode"))
            cfg.head_mode = head_mode_from_name(j["head_mode"].get<std::string>());
        if (j.contains("teacher_forcing"))
            cfg.teacher_forcing = j["teacher_forcing"].get<bool>();
        if (j.contains("pre_norm")) cfg.pre_norm = j["pre_norm"].get<bool>();
        if (j.contains("class_weights") && !j["class_weights"].is_null())
            cfg.class_weights = j["class_weights"].get<std::vector<double>>();
    } catch (const ordered_json::exception& e) {
        raise(Status::DecodeError, std::string("model config: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

namespace {

enum class Init { weight, bias, ln_gain, ln_bias, embedding };

using Builder = std::function<Tensor(const std::string&, int64_t, int64_t, Init)>;

} // namespace

TsModel::TsModel(ModelConfig cfg) : cfg_(std::move(cfg)) {
    cfg_.validate();
}

TsModel::TsModel(ModelConfig cfg, uint64_t init_seed) : TsModel(std::move(cfg)) {
    Rng rng(init_seed);
    Builder build = [&rng](const std::string&, int64_t rows, int64_t cols, Init kind) {
        Tensor t = Tensor::zeros(rows, cols);
        switch (kind) {
        case Init::weight: {
            double scale = 1.0 / std::sqrt(static_cast<double>(rows));
            for (double& v : t.values()) v = scale * rng.gaussian();
            break;
        }
        case Init::bias:
        case Init::ln_bias:
            break;
        case Init::ln_gain:
            std::fill(t.values().begin(), t.values().end(), 1.0);
            break;
        case Init::embedding:
            for (double& v : t.values()) v = 0.3 * rng.gaussian();
            break;
        }
        return t;
    };

    const Taxonomy& tax = Taxonomy::instance();
    auto reg = [this, &build](const std::string& name, int64_t rows, int64_t cols,
                              Init kind) {
        param_index_.emplace(name, params_.size());
        params_.emplace_back(name, build(name, rows, cols, kind));
    };

    reg("align.ln_img.g", 1, cfg_.d_img, Init::ln_gain);
    reg("align.ln_img.b", 1, cfg_.d_img, Init::ln_bias);
    reg("align.ln_txt.g", 1, cfg_.d_txt, Init::ln_gain);
    reg("align.ln_txt.b", 1, cfg_.d_txt, Init::ln_bias);
    reg("align.ln_num.g", 1, cfg_.d_num, Init::ln_gain);
    reg("align.ln_num.b", 1, cfg_.d_num, Init::ln_bias);
    reg("align.w_img", cfg_.d_img, cfg_.d_model, Init::weight);
    reg("align.w_txt", cfg_.d_txt, cfg_.d_model, Init::weight);
    reg("align.w_num", cfg_.d_num, cfg_.d_model, Init::weight);
    reg("align.b", 1, cfg_.d_model, Init::bias);
    reg("cls", 1, cfg_.d_model, Init::embedding);
    reg("pos", kPositionSlots, cfg_.d_model, Init::embedding);

    for (int l = 0; l < cfg_.n_layers; ++l) {
        std::string prefix = "layers." + std::to_string(l) + ".";
        reg(prefix + "ln1.g", 1, cfg_.d_model, Init::ln_gain);
        reg(prefix + "ln1.b", 1, cfg_.d_model, Init::ln_bias);
        reg(prefix + "wq", cfg_.d_model, cfg_.d_model, Init::weight);
        reg(prefix + "bq", 1, cfg_.d_model, Init::bias);
        reg(prefix + "wk", cfg_.d_model, cfg_.d_model, Init::weight);
        reg(prefix + "bk", 1, cfg_.d_model, Init::bias);
        reg(prefix + "wv", cfg_.d_model, cfg_.d_model, Init::weight);
        reg(prefix + "bv", 1, cfg_.d_model, Init::bias);
        reg(prefix + "wo", cfg_.d_model, cfg_.d_model, Init::weight);
        reg(prefix + "bo", 1, cfg_.d_model, Init::bias);
        reg(prefix + "ln2.g", 1, cfg_.d_model, Init::ln_gain);
        reg(prefix + "ln2.b", 1, cfg_.d_model, Init::ln_bias);
        reg(prefix + "w1", cfg_.d_model, cfg_.d_mlp, Init::weight);
        reg(prefix + "b1", 1, cfg_.d_mlp, Init::bias);
        reg(prefix + "w2", cfg_.d_mlp, cfg_.d_model, Init::weight);
        reg(prefix + "b2", 1, cfg_.d_model, Init::bias);
    }

    reg("ln_f.g", 1, cfg_.d_model, Init::ln_gain);
    reg("ln_f.b", 1, cfg_.d_model, Init::ln_bias);

    const int pooled = cfg_.pooled_dim();
    reg("head.type.w", pooled, Taxonomy::kNumTypes, Init::weight);
    reg("head.type.b", 1, Taxonomy::kNumTypes, Init::bias);

    switch (cfg_.head_mode) {
    case HeadMode::individual:
        reg("head.sub.w", pooled, Taxonomy::kNumSubtypes, Init::weight);
        reg("head.sub.b", 1, Taxonomy::kNumSubtypes, Init::bias);
        break;
    case HeadMode::f_conditioned:
        reg("head.sub.w", pooled + Taxonomy::kNumTypes, Taxonomy::kNumSubtypes,
            Init::weight);
        reg("head.sub.b", 1, Taxonomy::kNumSubtypes, Init::bias);
        break;
    case HeadMode::i_conditioned:
        for (int t = 0; t < Taxonomy::kNumTypes; ++t) {
            int64_t width = static_cast<int64_t>(tax.subtypes_of(t).size());
            std::string prefix = "head.sub." + std::to_string(t) + ".";
            reg(prefix + "w", pooled, width, Init::weight);
            reg(prefix + "b", 1, width, Init::bias);
        }
        break;
    }
}

const Tensor& TsModel::param(const std::string& name) const {
    auto it = param_index_.find(name);
    if (it == param_index_.end()) raise(Status::Internal, "missing parameter: " + name);
    return params_[it->second].second;
}

Tensor TsModel::align(Tape& tape, const ModalFeatures& f) const {
    if (static_cast<int>(f.image.size()) != cfg_.d_img ||
        static_cast<int>(f.text.size()) != cfg_.d_txt ||
        static_cast<int>(f.numeric.size()) != cfg_.d_num)
        raise(Status::ShapeMismatch,
              "features (" + std::to_string(f.image.size()) + "," +
                  std::to_string(f.text.size()) + "," + std::to_string(f.numeric.size()) +
                  ") vs config (" + std::to_string(cfg_.d_img) + "," +
                  std::to_string(cfg_.d_txt) + "," + std::to_string(cfg_.d_num) + ")");

    Tensor img = Tensor::from(1, cfg_.d_img, f.image);
    Tensor txt = Tensor::from(1, cfg_.d_txt, f.text);
    Tensor num = Tensor::from(1, cfg_.d_num, f.numeric);
    if (cfg_.pre_norm) {
        img = tape.layer_norm(img, param("align.ln_img.g"), param("align.ln_img.b"));
        txt = tape.layer_norm(txt, param("align.ln_txt.g"), param("align.ln_txt.b"));
        num = tape.layer_norm(num, param("align.ln_num.g"), param("align.ln_num.b"));
    }
    Tensor x = tape.add(tape.add(tape.matmul(img, param("align.w_img")),
                                 tape.matmul(txt, param("align.w_txt"))),
                        tape.matmul(num, param("align.w_num")));
    return tape.add(x, param("align.b"));
}

Tensor TsModel::forward(Tape& tape, const std::vector<ModalFeatures>& window) const {
    const int t_attempts = static_cast<int>(window.size());
    if (t_attempts < 1) raise(Status::InvalidArgument, "forward needs at least one token");
    if (t_attempts > kMaxTokens)
        raise(Status::SequenceTooLong,
              std::to_string(t_attempts) + " attempts exceed the positional table (" +
                  std::to_string(kMaxTokens) + ")");

    std::vector<Tensor> rows;
    rows.reserve(static_cast<size_t>(t_attempts) + 1);
    for (const ModalFeatures& f : window) rows.push_back(align(tape, f));
    rows.push_back(param("cls")); // [CLS] appended at the sequence end

    Tensor x = tape.stack_rows(rows);
    // Right-aligned position slots: the query always lands on slot 20 and
    // [CLS] on slot 21, regardless of history length.
    x = tape.add(x, tape.slice_rows(param("pos"), kMaxTokens - t_attempts,
                                    kPositionSlots));

    const int dh = cfg_.d_model / cfg_.n_heads;
    for (int l = 0; l < cfg_.n_layers; ++l) {
        std::string prefix = "layers." + std::to_string(l) + ".";
        Tensor h = tape.layer_norm(x, param(prefix + "ln1.g"), param(prefix + "ln1.b"));
        Tensor q = tape.add_bias(tape.matmul(h, param(prefix + "wq")), param(prefix + "bq"));
        Tensor k = tape.add_bias(tape.matmul(h, param(prefix + "wk")), param(prefix + "bk"));
        Tensor v = tape.add_bias(tape.matmul(h, param(prefix + "wv")), param(prefix + "bv"));

        Tensor heads;
        for (int hd = 0; hd < cfg_.n_heads; ++hd) {
            Tensor qh = tape.slice_cols(q, hd * dh, (hd + 1) * dh);
            Tensor kh = tape.slice_cols(k, hd * dh, (hd + 1) * dh);
            Tensor vh = tape.slice_cols(v, hd * dh, (hd + 1) * dh);
            Tensor ah = tape.scaled_dot_attention(qh, kh, vh);
            heads = hd == 0 ? ah : tape.concat_cols(heads, ah);
        }
        Tensor att = tape.add_bias(tape.matmul(heads, param(prefix + "wo")),
                                   param(prefix + "bo"));
        x = tape.add(x, att);

        Tensor h2 = tape.layer_norm(x, param(prefix + "ln2.g"), param(prefix + "ln2.b"));
        Tensor mid = tape.gelu(
            tape.add_bias(tape.matmul(h2, param(prefix + "w1")), param(prefix + "b1")));
        Tensor mlp = tape.add_bias(tape.matmul(mid, param(prefix + "w2")),
                                   param(prefix + "b2"));
        x = tape.add(x, mlp);
    }
    x = tape.layer_norm(x, param("ln_f.g"), param("ln_f.b"));

    switch (cfg_.pooling) {
    case Pooling::last:
        return tape.slice_rows(x, t_attempts - 1, t_attempts);
    case Pooling::mean:
        return tape.mean_rows(tape.slice_rows(x, 0, t_attempts));
    case Pooling::cls:
        return tape.slice_rows(x, t_attempts, t_attempts + 1);
    case Pooling::mean_cls:
        return tape.concat_cols(tape.mean_rows(tape.slice_rows(x, 0, t_attempts)),
                                tape.slice_rows(x, t_attempts, t_attempts + 1));
    }
    raise(Status::Internal, "unreachable pooling");
}

namespace {

int argmax(const std::vector<double>& v) {
    int best = 0;
    for (size_t i = 1; i < v.size(); ++i)
        if (v[i] > v[static_cast<size_t>(best)]) best = static_cast<int>(i);
    return best;
}

std::vector<double> softmax_values(const std::vector<double>& logits) {
    double m = logits[0];
    for (double x : logits) m = std::max(m, x);
    std::vector<double> p(logits.size());
    double sum = 0.0;
    for (size_t i = 0; i < logits.size(); ++i) {
        p[i] = std::exp(logits[i] - m);
        sum += p[i];
    }
    for (double& x : p) x /= sum;
    return p;
}

} // namespace

TsModel::LossResult TsModel::heads_loss(Tape& tape, const Tensor& pooled,
                                        const ErrorLabel& truth) const {
    const Taxonomy& tax = Taxonomy::instance();
    tax.make_label(truth.type_id, truth.subtype_id); // LabelInconsistent guard

    std::optional<Tensor> weights;
    if (cfg_.class_weights)
        weights = Tensor::from(1, Taxonomy::kNumTypes, *cfg_.class_weights);

    Tensor type_logits =
        tape.add(tape.matmul(pooled, param("head.type.w")), param("head.type.b"));
    Tensor type_loss = tape.cross_entropy(type_logits, truth.type_id, weights);

    Tensor sub_loss;
    switch (cfg_.head_mode) {
    case HeadMode::individual: {
        Tensor logits =
            tape.add(tape.matmul(pooled, param("head.sub.w")), param("head.sub.b"));
        sub_loss = tape.cross_entropy(logits, truth.subtype_id);
        break;
    }
    case HeadMode::f_conditioned: {
        Tensor input = tape.concat_cols(pooled, tape.softmax_rows(type_logits));
        Tensor logits =
            tape.add(tape.matmul(input, param("head.sub.w")), param("head.sub.b"));
        sub_loss = tape.cross_entropy(logits, truth.subtype_id);
        break;
    }
    case HeadMode::i_conditioned: {
        // Teacher forcing trains the true type's head; the type decision
        // itself carries no gradient into the subtype path. Without it the
        // predicted type routes, and the subtype term counts only when the
        // routing hits the true parent.
        int route = truth.type_id;
        if (!cfg_.teacher_forcing) route = argmax(type_logits.values());
        if (route == truth.type_id) {
            std::string prefix = "head.sub." + std::to_string(route) + ".";
            Tensor logits = tape.add(tape.matmul(pooled, param(prefix + "w")),
                                     param(prefix + "b"));
            sub_loss = tape.cross_entropy(logits, tax.local_index(truth.subtype_id));
        } else {
            sub_loss = Tensor::scalar(0.0);
        }
        break;
    }
    }

    Tensor total = tape.add(type_loss, sub_loss);
    LossBreakdown breakdown{total.item(), type_loss.item(), sub_loss.item()};
    return LossResult{total, breakdown};
}

Prediction TsModel::predict(Tape& tape, const Tensor& pooled) const {
    const Taxonomy& tax = Taxonomy::instance();
    Tensor type_logits =
        tape.add(tape.matmul(pooled, param("head.type.w")), param("head.type.b"));
    Prediction pred;
    pred.type_probs = softmax_values(type_logits.values());
    pred.type_id = argmax(pred.type_probs);
    pred.confidence = pred.type_probs[static_cast<size_t>(pred.type_id)];

    switch (cfg_.head_mode) {
    case HeadMode::individual: {
        Tensor logits =
            tape.add(tape.matmul(pooled, param("head.sub.w")), param("head.sub.b"));
        pred.subtype_probs = softmax_values(logits.values());
        pred.subtype_id = argmax(pred.subtype_probs);
        break;
    }
    case HeadMode::f_conditioned: {
        Tensor input = tape.concat_cols(pooled, tape.softmax_rows(type_logits));
        Tensor logits =
            tape.add(tape.matmul(input, param("head.sub.w")), param("head.sub.b"));
        pred.subtype_probs = softmax_values(logits.values());
        pred.subtype_id = argmax(pred.subtype_probs);
        break;
    }
    case HeadMode::i_conditioned: {
        // The predicted type activates its own subtype head, so parent
        // consistency holds by construction.
        std::string prefix = "head.sub." + std::to_string(pred.type_id) + ".";
        Tensor logits =
            tape.add(tape.matmul(pooled, param(prefix + "w")), param(prefix + "b"));
        pred.subtype_probs = softmax_values(logits.values());
        pred.subtype_id =
            tax.subtypes_of(pred.type_id)[static_cast<size_t>(argmax(pred.subtype_probs))];
        break;
    }
    }
    return pred;
}

Prediction TsModel::predict(const std::vector<ModalFeatures>& window) const {
    Tape tape;
    Tensor pooled = forward(tape, window);
    return predict(tape, pooled);
}

void TsModel::zero_grads() const {
    for (const auto& [name, t] : params_) const_cast<Tensor&>(t).zero_grad();
}

std::vector<std::vector<double>> TsModel::snapshot_values() const {
    std::vector<std::vector<double>> snapshot;
    snapshot.reserve(params_.size());
    for (const auto& [name, t] : params_) snapshot.push_back(t.values());
    return snapshot;
}

void TsModel::restore_values(const std::vector<std::vector<double>>& snapshot) const {
    if (snapshot.size() != params_.size())
        raise(Status::InvalidArgument, "snapshot size mismatch");
    for (size_t i = 0; i < params_.size(); ++i)
        const_cast<Tensor&>(params_[i].second).values() = snapshot[i];
}

void TsModel::save(const std::string& path, const std::string& manifest_json) const {
    nn::save_checkpoint(path, manifest_json, params_);
}

TsModel TsModel::load(const std::string& path, std::string* manifest_json_out) {
    nn::Checkpoint ckpt = nn::load_checkpoint(path);
    ordered_json manifest = ordered_json::parse(ckpt.manifest_json, nullptr, false);
    if (manifest.is_discarded() || !manifest.contains("model"))
        raise(Status::DecodeError, "checkpoint manifest lacks a model config: " + path);
    ModelConfig cfg = ModelConfig::from_json(manifest["model"].dump());

    TsModel model(cfg, /*init_seed=*/0);
    if (ckpt.tensors.size() != model.params_.size())
        raise(Status::DecodeError, "checkpoint tensor count mismatch: " + path);
    for (size_t i = 0; i < model.params_.size(); ++i) {
        auto& [name, t] = model.params_[i];
        const auto& [saved_name, saved] = ckpt.tensors[i];
        if (saved_name != name)
            raise(Status::DecodeError,
                  "checkpoint tensor order mismatch: expected " + name + ", found " +
                      saved_name);
        if (saved.rows() != t.rows() || saved.cols() != t.cols())
            raise(Status::DecodeError, "checkpoint tensor shape mismatch for " + name);
        t.values() = saved.values();
    }
    if (manifest_json_out) *manifest_json_out = ckpt.manifest_json;
    return model;
}

} // namespace seqdiag::model
