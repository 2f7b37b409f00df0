#pragma once

#include "core/taxonomy.hpp"
#include "trainer/trainer.hpp"

#include <string>
#include <vector>

namespace seqdiag::eval {

/// Correct / total. Throws EmptyInput (InvalidArgument) on empty input or
/// length mismatch.
double accuracy(const std::vector<int>& predictions, const std::vector<int>& truths);

/// Unweighted mean; the "Avg" row convention.
double macro_average(const std::vector<double>& per_category);

struct CategoryReport {
    std::vector<double> per_type_accuracy; // 9, zero where no samples
    std::vector<size_t> per_type_count;    // 9
    double macro_avg = 0.0; // unweighted mean over types with samples
    double acc1 = 0.0;      // overall type accuracy
    double acc2 = 0.0;      // overall subtype accuracy
    size_t total = 0;
};

CategoryReport build_category_report(const std::vector<ErrorLabel>& predictions,
                                     const std::vector<ErrorLabel>& truths);

/// Run the model over featurized windows and tabulate.
CategoryReport evaluate_model(const model::TsModel& model,
                              const std::vector<train::Sample>& samples);

std::string category_report_csv(const CategoryReport& report);
std::string category_report_table(const CategoryReport& report);

} // namespace seqdiag::eval
