#include "evalsuite/metrics.hpp"

#include "common/error.hpp"
#include "tensor/tape.hpp"

#include <cstdio>
#include <sstream>

namespace seqdiag::eval {

double accuracy(const std::vector<int>& predictions, const std::vector<int>& truths) {
    if (predictions.empty())
        raise(Status::InvalidArgument, "accuracy of empty input");
    if (predictions.size() != truths.size())
        raise(Status::InvalidArgument,
              "accuracy length mismatch: " + std::to_string(predictions.size()) + " vs " +
                  std::to_string(truths.size()));
    size_t correct = 0;
    for (size_t i = 0; i < predictions.size(); ++i)
        if (predictions[i] == truths[i]) ++correct;
    return static_cast<double>(correct) / static_cast<double>(predictions.size());
}

double macro_average(const std::vector<double>& per_category) {
    if (per_category.empty())
        raise(Status::InvalidArgument, "macro average of empty input");
    double sum = 0.0;
    for (double a : per_category) sum += a;
    return sum / static_cast<double>(per_category.size());
}

CategoryReport build_category_report(const std::vector<ErrorLabel>& predictions,
                                     const std::vector<ErrorLabel>& truths) {
    if (predictions.empty() || predictions.size() != truths.size())
        raise(Status::InvalidArgument, "report needs equal-length nonempty inputs");

    CategoryReport report;
    report.per_type_accuracy.assign(Taxonomy::kNumTypes, 0.0);
    report.per_type_count.assign(Taxonomy::kNumTypes, 0);
    report.total = predictions.size();

    std::vector<size_t> per_type_correct(Taxonomy::kNumTypes, 0);
    size_t correct_type = 0, correct_sub = 0;
    for (size_t i = 0; i < predictions.size(); ++i) {
        size_t truth_type = static_cast<size_t>(truths[i].type_id);
        ++report.per_type_count[truth_type];
        if (predictions[i].type_id == truths[i].type_id) {
            ++per_type_correct[truth_type];
            ++correct_type;
        }
        if (predictions[i].subtype_id == truths[i].subtype_id) ++correct_sub;
    }

    double macro_sum = 0.0;
    size_t populated = 0;
    for (size_t t = 0; t < Taxonomy::kNumTypes; ++t) {
        if (report.per_type_count[t] == 0) continue;
        report.per_type_accuracy[t] = static_cast<double>(per_type_correct[t]) /
                                      static_cast<double>(report.per_type_count[t]);
        macro_sum += report.per_type_accuracy[t];
        ++populated;
    }
    report.macro_avg = populated > 0 ? macro_sum / static_cast<double>(populated) : 0.0;
    report.acc1 = static_cast<double>(correct_type) / static_cast<double>(report.total);
    report.acc2 = static_cast<double>(correct_sub) / static_cast<double>(report.total);
    return report;
}

CategoryReport evaluate_model(const model::TsModel& model,
                              const std::vector<train::Sample>& samples) {
    std::vector<ErrorLabel> predictions, truths;
    predictions.reserve(samples.size());
    truths.reserve(samples.size());
    const Taxonomy& tax = Taxonomy::instance();
    for (const train::Sample& s : samples) {
        model::Prediction p = model.predict(s.features);
        // Predictions may be parent-inconsistent outside i_conditioned mode;
        // tabulate them as reported.
        predictions.push_back(ErrorLabel{p.type_id, p.subtype_id});
        truths.push_back(s.truth);
        (void)tax;
    }
    return build_category_report(predictions, truths);
}

namespace {

std::string fmt4(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

} // namespace

std::string category_report_csv(const CategoryReport& report) {
    const Taxonomy& tax = Taxonomy::instance();
    std::ostringstream out;
    out << "category,count,accuracy\n";
    for (int t = 0; t < Taxonomy::kNumTypes; ++t)
        out << tax.type(t).name << "," << report.per_type_count[static_cast<size_t>(t)]
            << "," << fmt4(report.per_type_accuracy[static_cast<size_t>(t)]) << "\n";
    out << "Avg," << report.total << "," << fmt4(report.macro_avg) << "\n";
    out << "Acc1," << report.total << "," << fmt4(report.acc1) << "\n";
    out << "Acc2," << report.total << "," << fmt4(report.acc2) << "\n";
    return out.str();
}

std::string category_report_table(const CategoryReport& report) {
    const Taxonomy& tax = Taxonomy::instance();
    std::ostringstream out;
    char line[128];
    std::snprintf(line, sizeof(line), "%-26s %8s %10s\n", "Category", "Count", "Accuracy");
    out << line;
    for (int t = 0; t < Taxonomy::kNumTypes; ++t) {
        std::snprintf(line, sizeof(line), "%-26s %8zu %10.4f\n", tax.type(t).name.c_str(),
                      report.per_type_count[static_cast<size_t>(t)],
                      report.per_type_accuracy[static_cast<size_t>(t)]);
        out << line;
    }
    std::snprintf(line, sizeof(line), "%-26s %8zu %10.4f\n", "Avg", report.total,
                  report.macro_avg);
    out << line;
    std::snprintf(line, sizeof(line), "%-26s %8zu %10.4f\n", "Acc1 (type)", report.total,
                  report.acc1);
    out << line;
    std::snprintf(line, sizeof(line), "%-26s %8zu %10.4f\n", "Acc2 (subtype)",
                  report.total, report.acc2);
    out << line;
    return out.str();
}

} // namespace seqdiag::eval
