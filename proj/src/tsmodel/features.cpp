#include "tsmodel/features.hpp"

#include "common/error.hpp"

namespace seqdiag::model {

std::string attempt_text(const AttemptRecord& attempt, bool include_label) {
    const Taxonomy& tax = Taxonomy::instance();
    std::string type_part = kUnknownLabelSentinel;
    std::string subtype_part = kUnknownLabelSentinel;
    if (include_label) {
        if (!attempt.label)
            raise(Status::InvalidArgument, "history attempt has no label");
        type_part = tax.type(attempt.label->type_id).name;
        subtype_part = tax.subtype(attempt.label->subtype_id).name;
    }
    return attempt.problem_text + "\ncorrect answer: " + attempt.correct_answer +
           "\nstudent answer: " + attempt.student_answer + "\n" + attempt.analysis_text +
           "\nerror type: " + type_part + "\nerror subtype: " + subtype_part;
}

std::vector<ModalFeatures> featurize(const HistoryWindow& window,
                                     const EncoderProvider& provider) {
    std::vector<const AttemptRecord*> attempts;
    for (const AttemptRecord& a : window.history) attempts.push_back(&a);
    attempts.push_back(&window.query);

    std::vector<ModalFeatures> features;
    features.reserve(attempts.size());
    for (size_t i = 0; i < attempts.size(); ++i) {
        const AttemptRecord& a = *attempts[i];
        const bool is_query = (i + 1 == attempts.size());
        ModalFeatures f;
        try {
            f.text = provider.embed_text(attempt_text(a, !is_query));
            f.image = provider.embed_image(a.draft_ref);
        } catch (const Error& e) {
            if (e.status() == Status::InvalidArgument) throw;
            raise(Status::ProviderFailure,
                  "attempt " + std::to_string(i) + ": " + e.what());
        } catch (const std::exception& e) {
            raise(Status::ProviderFailure,
                  "attempt " + std::to_string(i) + ": " + e.what());
        }
        if (static_cast<int>(f.text.size()) != provider.text_dim() ||
            static_cast<int>(f.image.size()) != provider.image_dim())
            raise(Status::ProviderFailure,
                  "attempt " + std::to_string(i) + ": provider dimension drift");

        double gap_days = 0.0;
        if (i > 0)
            gap_days = static_cast<double>(a.timestamp - attempts[i - 1]->timestamp) /
                       static_cast<double>(kSecondsPerDay);
        f.numeric = {static_cast<double>(i) / kMaxHistory, gap_days / 30.0};
        features.push_back(std::move(f));
    }
    return features;
}

} // namespace seqdiag::model
