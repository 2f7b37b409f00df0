#include "agents/prompting.hpp"

#include "common/error.hpp"
#include "common/text.hpp"

#include <cstdio>
#include <sstream>

namespace seqdiag::agents {

TimeAgentOutput render_hint(const model::Prediction& prediction,
                            bool include_confidence) {
    const Taxonomy& tax = Taxonomy::instance();
    std::ostringstream out;
    out << "Predicted Error Type: " << tax.type(prediction.type_id).name << "\n";
    out << "Predicted Error Subtype: " << tax.subtype(prediction.subtype_id).name << "\n";
    if (include_confidence) {
        char buf[48];
        std::snprintf(buf, sizeof(buf), "Confidence: %.2f\n", prediction.confidence);
        out << buf;
    }
    return TimeAgentOutput{prediction, out.str()};
}

std::string build_prompt(const AttemptRecord& attempt,
                         const std::optional<TimeAgentOutput>& hint) {
    const Taxonomy& tax = Taxonomy::instance();
    std::ostringstream out;
    out << "You are an experienced mathematics educator. Classify the student's "
           "error on the attempt below and give a reason and a suggestion.\n\n";

    out << "Error categories and subcategories:\n";
    for (const ErrorType& t : tax.types()) {
        out << "- " << t.name << "\n";
        for (int sid : tax.subtypes_of(t.id)) {
            const ErrorSubtype& s = tax.subtype(sid);
            out << "    * " << s.name << ": " << s.definition << "\n";
        }
    }

    out << "\nProblem: " << attempt.problem_text << "\n";
    out << "Correct answer: " << attempt.correct_answer << "\n";
    out << "Student answer: " << attempt.student_answer << "\n";
    out << "Analysis: " << attempt.analysis_text << "\n";
    out << "Draft image: " << attempt.draft_ref << "\n";

    if (hint) {
        out << "\n" << kHintBegin << "\n"
            << hint->rendered_hint << kHintEnd << "\n";
        out << "A sequential model trained on this student's history produced the "
               "prediction above. Weigh it against the attempt itself.\n";
    }

    out << "\n" << kThinkingInstruction << "\n";
    out << "Reply with exactly these lines:\n"
           "THINKING: <your reasoning>\n"
           "ERROR_TYPE: <one of the 9 category names>\n"
           "SUB_TYPE: <one of the 29 subcategory names>\n"
           "REASON: <why the student made this error>\n"
           "SUGGESTION: <how the student should improve>\n";
    return out.str();
}

std::optional<ErrorLabel> extract_hint_labels(const std::string& prompt) {
    size_t begin = prompt.find(kHintBegin);
    if (begin == std::string::npos) return std::nullopt;
    size_t end = prompt.find(kHintEnd, begin);
    if (end == std::string::npos) return std::nullopt;
    std::string block = prompt.substr(begin, end - begin);

    const Taxonomy& tax = Taxonomy::instance();
    auto field = [&block](const char* key) -> std::string {
        size_t pos = block.find(key);
        if (pos == std::string::npos) return {};
        pos += std::string(key).size();
        size_t eol = block.find('\n', pos);
        return block.substr(pos, eol == std::string::npos ? std::string::npos : eol - pos);
    };
    auto type_id = tax.find_type(field("Predicted Error Type:"));
    auto subtype_id = tax.find_subtype(field("Predicted Error Subtype:"));
    if (!type_id || !subtype_id) return std::nullopt;
    return ErrorLabel{*type_id, *subtype_id};
}

namespace {

// Key prefix match at the start of a line, case-insensitive, value after ':'.
std::optional<std::string> match_field(const std::string& line, const char* key) {
    const std::string lowered = to_lower(line);
    const std::string k = to_lower(std::string(key)) + ":";
    size_t start = lowered.find_first_not_of(" \t");
    if (start == std::string::npos) return std::nullopt;
    if (lowered.compare(start, k.size(), k) != 0) return std::nullopt;
    return normalize_whitespace(line.substr(start + k.size()));
}

} // namespace

Diagnosis parse_response(const std::string& text) {
    std::optional<std::string> thinking, type_name, subtype_name, reason, suggestion;

    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (!thinking)
            if (auto v = match_field(line, "THINKING")) { thinking = v; continue; }
        if (!type_name)
            if (auto v = match_field(line, "ERROR_TYPE")) { type_name = v; continue; }
        if (!subtype_name)
            if (auto v = match_field(line, "SUB_TYPE")) { subtype_name = v; continue; }
        if (!reason)
            if (auto v = match_field(line, "REASON")) { reason = v; continue; }
        if (!suggestion)
            if (auto v = match_field(line, "SUGGESTION")) { suggestion = v; continue; }
    }

    if (!type_name || !subtype_name)
        raise(Status::UnparseableResponse, "reply lacks ERROR_TYPE or SUB_TYPE lines");

    const Taxonomy& tax = Taxonomy::instance();
    auto type_id = tax.find_type(*type_name);
    auto subtype_id = tax.find_subtype(*subtype_name);
    if (!type_id)
        raise(Status::UnparseableResponse, "unknown ERROR_TYPE \"" + *type_name + "\"");
    if (!subtype_id)
        raise(Status::UnparseableResponse, "unknown SUB_TYPE \"" + *subtype_name + "\"");

    Diagnosis d;
    d.subtype_id = *subtype_id;
    d.type_id = *type_id;
    if (tax.subtype(*subtype_id).parent != *type_id) {
        // Subtypes are the more specific claim; trust them and flag the repair.
        d.type_id = tax.subtype(*subtype_id).parent;
        d.repaired_parent = true;
    }
    d.thinking = thinking.value_or("");
    d.reason = reason.value_or("");
    d.suggestion = suggestion.value_or("");
    return d;
}

} // namespace seqdiag::agents
