#include "common/error.hpp"
#include "common/rng.hpp"
#include "sim/simulator.hpp"
#include "tensor/gradcheck.hpp"
#include "tsmodel/features.hpp"
#include "tsmodel/model.hpp"
#include "tsmodel/provider.hpp"

#include <doctest.h>

#include <cmath>

using namespace seqdiag;
using namespace seqdiag::model;

namespace {

AttemptRecord labeled_attempt(const std::string& student, int64_t ts, int subtype_id) {
    AttemptRecord a;
    a.student_id = student;
    a.timestamp = ts;
    a.problem_text = "Worksheet item 101: compute the required value.";
    a.correct_answer = "12";
    a.student_answer = "15";
    a.analysis_text = "single numeric result expected";
    a.draft_ref = "draft://" + student + "/" + std::to_string(ts);
    a.label = Taxonomy::instance().label_from_subtype(subtype_id);
    return a;
}

HistoryWindow small_window(int history_len) {
    StudentTrajectory t;
    t.student_id = "s1";
    for (int i = 0; i <= history_len; ++i)
        t.attempts.push_back(
            labeled_attempt("s1", 1000 + int64_t(i) * kSecondsPerDay, (i * 5) % 29));
    return make_window(t, history_len);
}

std::vector<ModalFeatures> random_features(Rng& rng, int count, int d_img, int d_txt) {
    std::vector<ModalFeatures> features;
    for (int i = 0; i < count; ++i) {
        ModalFeatures f;
        for (int d = 0; d < d_img; ++d) f.image.push_back(rng.gaussian());
        for (int d = 0; d < d_txt; ++d) f.text.push_back(rng.gaussian());
        f.numeric = {rng.uniform(), rng.uniform()};
        features.push_back(std::move(f));
    }
    return features;
}

ModelConfig tiny_config() {
    ModelConfig cfg;
    cfg.d_model = 8;
    cfg.n_layers = 1;
    cfg.n_heads = 2;
    cfg.d_mlp = 16;
    cfg.d_txt = 6;
    cfg.d_img = 6;
    return cfg;
}

void zero_all_params(const TsModel& ts_model) {
    for (const auto& [name, t] : ts_model.named_params())
        std::fill(const_cast<nn::Tensor&>(t).values().begin(),
                  const_cast<nn::Tensor&>(t).values().end(), 0.0);
}

} // namespace

TEST_CASE("featurize yields one ModalFeatures per attempt, query last") {
    auto provider = make_stub_provider(3, EncoderProvider::Mode::pooled, 16, 16);
    HistoryWindow w = small_window(20);
    std::vector<ModalFeatures> features = featurize(w, *provider);
    CHECK(features.size() == 21);
    for (const ModalFeatures& f : features) {
        CHECK(f.text.size() == 16);
        CHECK(f.image.size() == 16);
        CHECK(f.numeric.size() == 2);
    }
    // Numeric features: window-relative position over 20, gap in months.
    CHECK(features[0].numeric[0] == doctest::Approx(0.0));
    CHECK(features[5].numeric[0] == doctest::Approx(5.0 / 20.0));
    CHECK(features[5].numeric[1] == doctest::Approx(1.0 / 30.0));
}

TEST_CASE("query features are independent of the hidden ground-truth label") {
    auto provider = make_stub_provider(3, EncoderProvider::Mode::pooled, 16, 16);
    HistoryWindow w = small_window(4);
    std::vector<ModalFeatures> base = featurize(w, *provider);

    HistoryWindow perturbed = w;
    perturbed.truth.label = Taxonomy::instance().label_from_subtype(
        (perturbed.truth.label->subtype_id + 11) % 29);
    std::vector<ModalFeatures> after = featurize(perturbed, *provider);
    for (size_t i = 0; i < base.size(); ++i) {
        CHECK(base[i].text == after[i].text);
        CHECK(base[i].image == after[i].image);
    }
}

TEST_CASE("identical history attempts embed identically") {
    auto provider = make_stub_provider(3, EncoderProvider::Mode::pooled, 16, 16);
    HistoryWindow w = small_window(2);
    w.history[1] = w.history[0]; // same content, same label
    std::vector<ModalFeatures> features = featurize(w, *provider);
    CHECK(features[0].text == features[1].text);
    CHECK(features[0].image == features[1].image);
}

TEST_CASE("history label names reach the embedded text; the query gets a sentinel") {
    HistoryWindow w = small_window(1);
    std::string history_text = attempt_text(w.history[0], true);
    std::string query_text = attempt_text(w.query, false);
    const Taxonomy& tax = Taxonomy::instance();
    CHECK(history_text.find(tax.type(w.history[0].label->type_id).name) !=
          std::string::npos);
    CHECK(query_text.find(kUnknownLabelSentinel) != std::string::npos);
    for (const ErrorType& t : tax.types())
        CHECK(query_text.find(t.name) == std::string::npos);
}

TEST_CASE("alignment collapses to the bias when weights are zero") {
    ModelConfig cfg = tiny_config();
    cfg.pre_norm = false;
    TsModel ts_model(cfg, 5);
    zero_all_params(ts_model);

    Rng rng(1);
    ModalFeatures f = random_features(rng, 1, cfg.d_img, cfg.d_txt)[0];
    nn::Tape tape;
    nn::Tensor token = ts_model.align(tape, f);
    for (double v : token.values()) CHECK(v == 0.0);
}

TEST_CASE("pre-norm makes alignment insensitive to modality rescaling") {
    ModelConfig cfg = tiny_config();
    cfg.pre_norm = true;
    TsModel ts_model(cfg, 5);

    Rng rng(2);
    ModalFeatures f = random_features(rng, 1, cfg.d_img, cfg.d_txt)[0];
    ModalFeatures scaled = f;
    for (double& v : scaled.image) v *= 1000.0;

    nn::Tape tape;
    nn::Tensor a = ts_model.align(tape, f);
    nn::Tensor b = ts_model.align(tape, scaled);
    double diff = 0.0;
    for (size_t i = 0; i < a.values().size(); ++i)
        diff = std::max(diff, std::fabs(a.values()[i] - b.values()[i]));
    CHECK(diff < 1e-3);
}

TEST_CASE("without pre-norm the same rescaling changes the token proportionally") {
    ModelConfig cfg = tiny_config();
    cfg.pre_norm = false;
    TsModel ts_model(cfg, 5);

    Rng rng(2);
    ModalFeatures f = random_features(rng, 1, cfg.d_img, cfg.d_txt)[0];
    ModalFeatures scaled = f;
    for (double& v : scaled.image) v *= 1000.0;

    nn::Tape tape;
    nn::Tensor a = ts_model.align(tape, f);
    nn::Tensor b = ts_model.align(tape, scaled);
    double diff = 0.0;
    for (size_t i = 0; i < a.values().size(); ++i)
        diff = std::max(diff, std::fabs(a.values()[i] - b.values()[i]));
    CHECK(diff > 1.0);
}

TEST_CASE("single-token mean pooling equals that token's transformed output") {
    ModelConfig cfg = tiny_config();
    cfg.pooling = Pooling::mean;
    TsModel mean_model(cfg, 11);
    cfg.pooling = Pooling::last;
    TsModel last_model(cfg, 11);

    Rng rng(3);
    std::vector<ModalFeatures> window = random_features(rng, 1, cfg.d_img, cfg.d_txt);
    nn::Tape t1, t2;
    nn::Tensor pooled_mean = mean_model.forward(t1, window);
    nn::Tensor pooled_last = last_model.forward(t2, window);
    REQUIRE(pooled_mean.values().size() == pooled_last.values().size());
    for (size_t i = 0; i < pooled_mean.values().size(); ++i)
        CHECK(pooled_mean.values()[i] == doctest::Approx(pooled_last.values()[i]));
}

TEST_CASE("mean_cls pooling is twice d_model wide") {
    ModelConfig cfg = tiny_config();
    cfg.pooling = Pooling::mean_cls;
    TsModel ts_model(cfg, 11);
    Rng rng(4);
    std::vector<ModalFeatures> window = random_features(rng, 3, cfg.d_img, cfg.d_txt);
    nn::Tape tape;
    CHECK(ts_model.forward(tape, window).cols() == 2 * cfg.d_model);
}

TEST_CASE("permuting two history tokens changes the pooled output") {
    ModelConfig cfg = tiny_config();
    TsModel ts_model(cfg, 11);
    Rng rng(5);
    std::vector<ModalFeatures> window = random_features(rng, 4, cfg.d_img, cfg.d_txt);
    std::vector<ModalFeatures> swapped = window;
    std::swap(swapped[0], swapped[1]);

    nn::Tape t1, t2;
    nn::Tensor a = ts_model.forward(t1, window);
    nn::Tensor b = ts_model.forward(t2, swapped);
    double diff = 0.0;
    for (size_t i = 0; i < a.values().size(); ++i)
        diff = std::max(diff, std::fabs(a.values()[i] - b.values()[i]));
    CHECK(diff > 1e-8);
}

TEST_CASE("sequences beyond the positional table are rejected") {
    ModelConfig cfg = tiny_config();
    TsModel ts_model(cfg, 11);
    Rng rng(6);
    std::vector<ModalFeatures> window = random_features(rng, 22, cfg.d_img, cfg.d_txt);
    nn::Tape tape;
    try {
        ts_model.forward(tape, window);
        FAIL("expected SequenceTooLong");
    } catch (const Error& e) {
        CHECK(e.status() == Status::SequenceTooLong);
    }
}

TEST_CASE("uniform logits give ln 9 + ln 6 = ln 54 under teacher forcing") {
    ModelConfig cfg = tiny_config();
    cfg.head_mode = HeadMode::i_conditioned;
    cfg.teacher_forcing = true;
    TsModel ts_model(cfg, 1);
    zero_all_params(ts_model);

    const Taxonomy& tax = Taxonomy::instance();
    ErrorLabel truth = tax.make_label(*tax.find_type("Computation Errors"),
                                      *tax.find_subtype("Arithmetic Errors"));
    nn::Tape tape;
    nn::Tensor pooled = nn::Tensor::zeros(1, cfg.pooled_dim());
    auto loss = ts_model.heads_loss(tape, pooled, truth);
    CHECK(loss.breakdown.type_loss == doctest::Approx(std::log(9.0)).epsilon(1e-12));
    CHECK(loss.breakdown.subtype_loss == doctest::Approx(std::log(6.0)).epsilon(1e-12));
    CHECK(std::fabs(loss.breakdown.total - std::log(54.0)) < 1e-9);
    CHECK(loss.breakdown.total ==
          doctest::Approx(loss.breakdown.type_loss + loss.breakdown.subtype_loss)
              .epsilon(1e-15));
}

TEST_CASE("individual mode with a uniform 29-way head loses ln 29 on subtypes") {
    ModelConfig cfg = tiny_config();
    cfg.head_mode = HeadMode::individual;
    TsModel ts_model(cfg, 1);
    zero_all_params(ts_model);

    nn::Tape tape;
    nn::Tensor pooled = nn::Tensor::zeros(1, cfg.pooled_dim());
    auto loss = ts_model.heads_loss(tape, pooled,
                                    Taxonomy::instance().label_from_subtype(13));
    CHECK(loss.breakdown.subtype_loss ==
          doctest::Approx(std::log(29.0)).epsilon(1e-12));
}

TEST_CASE("a class weight of 2 on the true class doubles the type loss") {
    ModelConfig cfg = tiny_config();
    TsModel plain(cfg, 9);
    ModelConfig weighted_cfg = cfg;
    weighted_cfg.class_weights = std::vector<double>(9, 1.0);
    (*weighted_cfg.class_weights)[7] = 2.0;
    TsModel weighted(weighted_cfg, 9); // same init seed, same parameters

    const Taxonomy& tax = Taxonomy::instance();
    ErrorLabel truth = tax.label_from_subtype(22); // Computation Errors subtype (type 7)
    Rng rng(10);
    std::vector<ModalFeatures> window = random_features(rng, 2, cfg.d_img, cfg.d_txt);

    nn::Tape t1, t2;
    auto plain_loss = plain.heads_loss(t1, plain.forward(t1, window), truth);
    auto weighted_loss = weighted.heads_loss(t2, weighted.forward(t2, window), truth);
    CHECK(weighted_loss.breakdown.type_loss ==
          doctest::Approx(2.0 * plain_loss.breakdown.type_loss).epsilon(1e-12));
}

TEST_CASE("mismatched truth labels are rejected") {
    ModelConfig cfg = tiny_config();
    TsModel ts_model(cfg, 1);
    nn::Tape tape;
    nn::Tensor pooled = nn::Tensor::zeros(1, cfg.pooled_dim());
    CHECK_THROWS_AS(ts_model.heads_loss(tape, pooled, ErrorLabel{8, 22}), Error);
}

TEST_CASE("i_conditioned predictions are parent-consistent for any parameters") {
    const Taxonomy& tax = Taxonomy::instance();
    for (uint64_t seed = 1; seed <= 10; ++seed) {
        ModelConfig cfg = tiny_config();
        cfg.head_mode = HeadMode::i_conditioned;
        TsModel ts_model(cfg, seed);
        Rng rng(seed * 7);
        std::vector<ModalFeatures> window =
            random_features(rng, 1 + static_cast<int>(seed % 5), cfg.d_img, cfg.d_txt);
        Prediction p = ts_model.predict(window);
        CHECK(tax.subtype(p.subtype_id).parent == p.type_id);
        CHECK(p.confidence >= 1.0 / 9.0 - 1e-12);
        CHECK(p.confidence <= 1.0 + 1e-12);
        double sum = 0.0;
        for (double v : p.type_probs) sum += v;
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("prediction ties break toward the lowest index") {
    ModelConfig cfg = tiny_config();
    TsModel ts_model(cfg, 1);
    zero_all_params(ts_model); // all logits zero -> full tie
    nn::Tape tape;
    nn::Tensor pooled = nn::Tensor::zeros(1, cfg.pooled_dim());
    Prediction p = ts_model.predict(tape, pooled);
    CHECK(p.type_id == 0);
    CHECK(p.subtype_id == Taxonomy::instance().subtypes_of(0)[0]);
}

TEST_CASE("teacher forcing leaves every other subtype head without gradient") {
    ModelConfig cfg = tiny_config();
    cfg.head_mode = HeadMode::i_conditioned;
    cfg.teacher_forcing = true;
    TsModel ts_model(cfg, 21);

    const Taxonomy& tax = Taxonomy::instance();
    ErrorLabel truth = tax.label_from_subtype(22); // parent type 7
    Rng rng(11);
    std::vector<ModalFeatures> window = random_features(rng, 3, cfg.d_img, cfg.d_txt);

    ts_model.zero_grads();
    nn::Tape tape;
    auto loss = ts_model.heads_loss(tape, ts_model.forward(tape, window), truth);
    tape.backward(loss.total);

    for (const auto& [name, t] : ts_model.named_params()) {
        if (name.rfind("head.sub.", 0) != 0) continue;
        bool is_true_head = name.rfind("head.sub.7.", 0) == 0;
        double grad_norm = 0.0;
        if (t.has_grad())
            for (double g : const_cast<nn::Tensor&>(t).grad()) grad_norm += std::fabs(g);
        if (is_true_head)
            CHECK(grad_norm > 0.0);
        else
            CHECK(grad_norm == 0.0);
    }
}

TEST_CASE("full tiny model gradients match central differences") {
    ModelConfig cfg = tiny_config();
    cfg.head_mode = HeadMode::i_conditioned;
    cfg.teacher_forcing = true;
    cfg.pooling = Pooling::mean_cls;
    TsModel ts_model(cfg, 33);

    Rng rng(12);
    std::vector<ModalFeatures> window = random_features(rng, 3, cfg.d_img, cfg.d_txt);
    ErrorLabel truth = Taxonomy::instance().label_from_subtype(24);

    std::vector<nn::Tensor> params;
    for (const auto& [name, t] : ts_model.named_params()) params.push_back(t);
    auto f = [&](nn::Tape& tape) {
        return ts_model.heads_loss(tape, ts_model.forward(tape, window), truth).total;
    };
    CHECK(nn::grad_check(f, params) < 1e-3);
}

TEST_CASE("with pre-norm the predicted type survives modality rescaling") {
    ModelConfig cfg = tiny_config();
    cfg.pre_norm = true;
    TsModel ts_model(cfg, 14);
    Rng rng(15);
    std::vector<ModalFeatures> window = random_features(rng, 4, cfg.d_img, cfg.d_txt);
    Prediction before = ts_model.predict(window);
    for (ModalFeatures& f : window)
        for (double& v : f.image) v *= 137.0;
    Prediction after = ts_model.predict(window);
    CHECK(before.type_id == after.type_id);
}

TEST_CASE("stub provider embeds deterministically with unit norm in pooled mode") {
    StubProvider provider(77, EncoderProvider::Mode::pooled, 24, 24);
    std::string text = "some student work with no category names";
    CHECK(provider.embed_text(text) == provider.embed_text(text));
    double norm = 0.0;
    for (double v : provider.embed_text(text)) norm += v * v;
    CHECK(std::fabs(std::sqrt(norm) - 1.0) < 1e-9);
    CHECK(provider.embed_image("draft://x/1") == provider.embed_image("draft://x/1"));
}

TEST_CASE("pooled mode mixes in the planted direction for taxonomy names") {
    StubProvider provider(77, EncoderProvider::Mode::pooled, 24, 24);
    std::string with_name = "analysis text\nerror type: Computation Errors";
    std::string without_name = "analysis text\nerror type: [label unknown]";

    auto dot_with_dir = [&provider](const std::string& s, int type_id) {
        auto v = provider.embed_text(s);
        const auto& dir = provider.bank().type_text_direction(type_id);
        double dot = 0.0;
        for (size_t i = 0; i < v.size(); ++i) dot += v[i] * dir[i];
        return dot;
    };
    CHECK(dot_with_dir(with_name, 7) > 0.7);
    CHECK(std::fabs(dot_with_dir(without_name, 7)) < 0.5);
}

TEST_CASE("noise markers in the text perturb the planted direction") {
    StubProvider provider(77, EncoderProvider::Mode::pooled, 24, 24);
    sim::NoiseMarker quiet{0.0, 42};
    sim::NoiseMarker loud{2.0, 42};
    std::string base = "error type: Knowledge Gaps ";
    auto clean = provider.embed_text(base + sim::format_noise_marker(quiet));
    auto noisy = provider.embed_text(base + sim::format_noise_marker(loud));
    double diff = 0.0;
    for (size_t i = 0; i < clean.size(); ++i) diff += std::fabs(clean[i] - noisy[i]);
    CHECK(diff > 0.1);
}

TEST_CASE("raw mode has the designed per-dimension scale disparity") {
    StubProvider provider(77, EncoderProvider::Mode::raw, 32, 32);
    // Variance across many embeddings: first half of dimensions dominates.
    std::vector<double> var(32, 0.0);
    const int n = 200;
    for (int i = 0; i < n; ++i) {
        auto v = provider.embed_text("sample text " + std::to_string(i));
        for (size_t d = 0; d < v.size(); ++d) var[d] += v[d] * v[d] / n;
    }
    double first = 0.0, second = 0.0;
    for (size_t d = 0; d < 16; ++d) first += var[d] / 16;
    for (size_t d = 16; d < 32; ++d) second += var[d] / 16;
    CHECK(first / second >= 100.0);
}

TEST_CASE("raw mode applies a large per-input gain to images") {
    StubProvider provider(77, EncoderProvider::Mode::raw, 32, 32);
    double min_norm = 1e18, max_norm = 0.0;
    for (int i = 0; i < 200; ++i) {
        auto v = provider.embed_image("draft://s/" + std::to_string(i));
        double norm = 0.0;
        for (double x : v) norm += x * x;
        norm = std::sqrt(norm);
        min_norm = std::min(min_norm, norm);
        max_norm = std::max(max_norm, norm);
    }
    CHECK(max_norm / min_norm > 10.0);
}

TEST_CASE("model checkpoints round trip through save and load") {
    ModelConfig cfg = tiny_config();
    TsModel ts_model(cfg, 55);
    std::string path = "/tmp/seqdiag_model_roundtrip.ckpt";
    ts_model.save(path, R"({"model": )" + cfg.to_json() + "}");

    TsModel loaded = TsModel::load(path);
    Rng rng(16);
    std::vector<ModalFeatures> window = random_features(rng, 3, cfg.d_img, cfg.d_txt);
    Prediction a = ts_model.predict(window);
    Prediction b = loaded.predict(window);
    CHECK(a.type_id == b.type_id);
    CHECK(a.subtype_id == b.subtype_id);
    CHECK(a.confidence == doctest::Approx(b.confidence).epsilon(1e-15));
    std::remove(path.c_str());
}
