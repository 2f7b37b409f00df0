#include "trainer/trainer.hpp"

#include "common/error.hpp"
#include "common/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace seqdiag::train {

using model::TsModel;
using nn::Tape;
using nn::Tensor;

void TrainConfig::validate() const {
    if (lr <= 0.0) raise(Status::InvalidArgument, "lr must be > 0");
    if (max_epochs < 1) raise(Status::InvalidArgument, "max_epochs must be >= 1");
    if (patience < 1) raise(Status::InvalidArgument, "patience must be >= 1");
    if (batch_size < 1) raise(Status::InvalidArgument, "batch_size must be >= 1");
    if (train_fraction <= 0.0 || val_fraction <= 0.0 || test_fraction <= 0.0)
        raise(Status::InvalidArgument, "split fractions must be positive");
    if (std::fabs(train_fraction + val_fraction + test_fraction - 1.0) > 1e-9)
        raise(Status::InvalidArgument, "split fractions must sum to 1");
    if (max_history < 0) raise(Status::InvalidArgument, "max_history must be >= 0");
}

DatasetSplit split_dataset(const Dataset& dataset, double train_fraction,
                           double val_fraction, double test_fraction, uint64_t seed) {
    if (train_fraction <= 0.0 || val_fraction <= 0.0 || test_fraction <= 0.0 ||
        std::fabs(train_fraction + val_fraction + test_fraction - 1.0) > 1e-9)
        raise(Status::InvalidArgument, "split fractions must be positive and sum to 1");

    const size_t n = dataset.size();
    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(seed);
    rng.shuffle(order);

    size_t n_val = static_cast<size_t>(std::llround(val_fraction * static_cast<double>(n)));
    size_t n_test = static_cast<size_t>(std::llround(test_fraction * static_cast<double>(n)));
    n_val = std::max<size_t>(n_val, 1);
    n_test = std::max<size_t>(n_test, 1);
    if (n_val + n_test >= n)
        raise(Status::TooFewStudents,
              "cannot split " + std::to_string(n) + " students into three non-empty sets");
    size_t n_train = n - n_val - n_test;

    DatasetSplit split;
    for (size_t i = 0; i < n; ++i) {
        const StudentTrajectory& t = dataset[order[i]];
        if (i < n_train)
            split.train.push_back(t);
        else if (i < n_train + n_val)
            split.val.push_back(t);
        else
            split.test.push_back(t);
    }
    return split;
}

std::vector<HistoryWindow> build_windows(const Dataset& dataset, int64_t max_gap) {
    std::vector<HistoryWindow> windows;
    for (const StudentTrajectory& t : dataset) {
        for (int qi = 1; qi < static_cast<int>(t.attempts.size()); ++qi) {
            if (!t.attempts[static_cast<size_t>(qi)].label) continue;
            try {
                windows.push_back(make_window(t, qi, kMaxHistory, max_gap));
            } catch (const Error& e) {
                if (e.status() == Status::GapTooLarge ||
                    e.status() == Status::InsufficientHistory)
                    continue;
                throw;
            }
        }
    }
    return windows;
}

void truncate_history(std::vector<HistoryWindow>& windows, int max_history) {
    if (max_history < 0) raise(Status::InvalidArgument, "max_history must be >= 0");
    for (HistoryWindow& w : windows) {
        if (static_cast<int>(w.history.size()) <= max_history) continue;
        w.history.erase(w.history.begin(),
                        w.history.end() - static_cast<ptrdiff_t>(max_history));
    }
}

std::vector<Sample> featurize_windows(const std::vector<HistoryWindow>& windows,
                                      const model::EncoderProvider& provider) {
    std::vector<Sample> samples;
    samples.reserve(windows.size());
    for (const HistoryWindow& w : windows) {
        if (!w.truth.label)
            raise(Status::InvalidArgument, "window without a ground-truth label");
        samples.push_back(Sample{model::featurize(w, provider), *w.truth.label});
    }
    return samples;
}

std::vector<double> compute_class_weights(const std::vector<Sample>& train) {
    std::vector<double> counts(Taxonomy::kNumTypes, 0.0);
    for (const Sample& s : train) counts[static_cast<size_t>(s.truth.type_id)] += 1.0;
    const double total = static_cast<double>(train.size());
    std::vector<double> weights(Taxonomy::kNumTypes, 1.0);
    for (size_t k = 0; k < weights.size(); ++k)
        if (counts[k] > 0.0)
            weights[k] = total / (static_cast<double>(Taxonomy::kNumTypes) * counts[k]);
    double mean = std::accumulate(weights.begin(), weights.end(), 0.0) /
                  static_cast<double>(weights.size());
    for (double& w : weights) w /= mean;
    return weights;
}

bool EarlyStopper::update(double val_loss) {
    ++epoch_;
    if (best_epoch_ < 0 || val_loss < best_loss_) {
        best_loss_ = val_loss;
        best_epoch_ = epoch_;
        stale_ = 0;
        return false;
    }
    ++stale_;
    return stale_ >= patience_;
}

AdamOptimizer::AdamOptimizer(std::vector<Tensor> params, double lr, double beta1,
                             double beta2, double eps)
    : params_(std::move(params)), lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {
    for (const Tensor& p : params_) {
        m_.emplace_back(static_cast<size_t>(p.numel()), 0.0);
        v_.emplace_back(static_cast<size_t>(p.numel()), 0.0);
    }
}

void AdamOptimizer::step(double grad_scale) {
    ++t_;
    const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    for (size_t i = 0; i < params_.size(); ++i) {
        auto& values = params_[i].values();
        auto& grad = params_[i].grad();
        auto& m = m_[i];
        auto& v = v_[i];
        for (size_t j = 0; j < values.size(); ++j) {
            double g = grad[j] * grad_scale;
            m[j] = beta1_ * m[j] + (1.0 - beta1_) * g;
            v[j] = beta2_ * v[j] + (1.0 - beta2_) * g * g;
            double mhat = m[j] / bc1;
            double vhat = v[j] / bc2;
            values[j] -= lr_ * mhat / (std::sqrt(vhat) + eps_);
        }
    }
}

namespace {

struct EvalOutcome {
    double mean_loss = 0.0;
    double acc1 = 0.0;
    double acc2 = 0.0;
};

EvalOutcome evaluate_samples(const TsModel& model, const std::vector<Sample>& samples) {
    EvalOutcome out;
    if (samples.empty()) return out;
    size_t correct_type = 0, correct_sub = 0;
    for (const Sample& s : samples) {
        Tape tape;
        Tensor pooled = model.forward(tape, s.features);
        auto loss = model.heads_loss(tape, pooled, s.truth);
        out.mean_loss += loss.breakdown.total;
        model::Prediction pred = model.predict(tape, pooled);
        if (pred.type_id == s.truth.type_id) ++correct_type;
        if (pred.subtype_id == s.truth.subtype_id) ++correct_sub;
    }
    out.mean_loss /= static_cast<double>(samples.size());
    out.acc1 = static_cast<double>(correct_type) / static_cast<double>(samples.size());
    out.acc2 = static_cast<double>(correct_sub) / static_cast<double>(samples.size());
    return out;
}

} // namespace

TrainResult train_loop(TsModel& model, const TrainConfig& cfg,
                       const std::vector<Sample>& train_samples,
                       const std::vector<Sample>& val_samples) {
    cfg.validate();
    if (train_samples.empty())
        raise(Status::NoValidWindows, "no training windows survived filtering");
    if (val_samples.empty())
        raise(Status::NoValidWindows, "no validation windows survived filtering");

    std::vector<Tensor> params;
    for (const auto& [name, t] : model.named_params()) params.push_back(t);
    AdamOptimizer optimizer(params, cfg.lr, cfg.beta1, cfg.beta2, cfg.adam_eps);
    EarlyStopper stopper(cfg.patience);

    std::vector<size_t> order(train_samples.size());
    std::iota(order.begin(), order.end(), 0);

    TrainResult result;
    std::vector<std::vector<double>> best_values = model.snapshot_values();
    double best_val = 0.0;
    bool have_best = false;

    for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        Rng epoch_rng = Rng(cfg.seed).split(0x5A17u + static_cast<uint64_t>(epoch));
        epoch_rng.shuffle(order);

        double epoch_loss = 0.0;
        size_t batch_start = 0;
        while (batch_start < order.size()) {
            size_t batch_end = std::min(batch_start + static_cast<size_t>(cfg.batch_size),
                                        order.size());
            model.zero_grads();
            for (size_t i = batch_start; i < batch_end; ++i) {
                const Sample& s = train_samples[order[i]];
                Tape tape;
                Tensor pooled = model.forward(tape, s.features);
                auto loss = model.heads_loss(tape, pooled, s.truth);
                tape.backward(loss.total);
                epoch_loss += loss.breakdown.total;
            }
            optimizer.step(1.0 / static_cast<double>(batch_end - batch_start));
            batch_start = batch_end;
        }
        epoch_loss /= static_cast<double>(train_samples.size());

        EvalOutcome val = evaluate_samples(model, val_samples);
        result.history.push_back(
            EpochStats{epoch, epoch_loss, val.mean_loss, val.acc1, val.acc2});

        if (!have_best || val.mean_loss < best_val) {
            best_val = val.mean_loss;
            best_values = model.snapshot_values();
            have_best = true;
        }
        if (stopper.update(val.mean_loss)) break;
    }

    model.restore_values(best_values);
    result.best_epoch = stopper.best_epoch() + 1;
    result.best_val_loss = stopper.best_loss();
    return result;
}

} // namespace seqdiag::train
