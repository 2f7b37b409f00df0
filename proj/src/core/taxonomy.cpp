#include "core/taxonomy.hpp"

#include "common/error.hpp"
#include "common/text.hpp"

#include <cassert>

namespace seqdiag {

namespace {

struct SubtypeRow {
    const char* type_name;
    const char* subtype_name;
    const char* definition;
};

// Registry order fixes both the type ids (first appearance) and the global
// subtype ids (row order).
const SubtypeRow kRows[] = {
    {"Attitude Issues", "Messy Drafts",
     "Drafts show signs of careless scribbles."},
    {"Misunderstanding", "Ambiguous Statements",
     "The problem statement is read with an unclear or ambiguous meaning."},
    {"Misunderstanding", "Ignoring Constraints",
     "Constraints stated in the problem go unnoticed."},
    {"Misunderstanding", "Missing Key Info",
     "Critical information in the problem is overlooked."},
    {"Logical Reasoning", "Faulty Reasoning",
     "Conclusions are incorrect or deductions illogical."},
    {"Cognitive Bias Errors", "Misreading Info",
     "Information is misinterpreted due to non-habitual thinking."},
    {"Answering Technique", "Improper Format",
     "The answer is given in an improper format."},
    {"Answering Technique", "Draft Transcription",
     "Calculations on the draft are correct but transcribed wrongly."},
    {"Answering Technique", "Misaligned answer",
     "The answer is correct but presented in the wrong form."},
    {"Answering Technique", "Incorrect Order",
     "Answers are given in the wrong order."},
    {"Handwriting Errors", "Writing A, Thinking B",
     "Answer A is intended but answer B is written down."},
    {"Handwriting Errors", "Digit Transcription",
     "Calculation is correct but digits are copied incorrectly."},
    {"Handwriting Errors", "Miscounting",
     "Counting mistakes."},
    {"Handwriting Errors", "Missing Units",
     "Units are omitted from the answer."},
    {"Handwriting Errors", "Incorrect Formula",
     "An incorrect formula is written down."},
    {"Handwriting Errors", "Extra/Missing Symbol",
     "Symbols are added or omitted during problem-solving."},
    {"Handwriting Errors", "Omitting Letters",
     "Letters are missed or added unnecessarily in the answer."},
    {"Attention to Detail", "Extra or Missing Zeros",
     "Zeros are added or omitted when handling numbers."},
    {"Attention to Detail", "Decimal Point Errors",
     "Decimal point placed incorrectly."},
    {"Attention to Detail", "Lack of Simplification",
     "Fractions or expressions are left unsimplified."},
    {"Attention to Detail", "Misplaced Parentheses",
     "Parentheses used incorrectly."},
    {"Attention to Detail", "Wrong Sign",
     "Incorrect sign usage during rearrangement."},
    {"Computation Errors", "Arithmetic Errors",
     "Miscalculations in addition, multiplication, or division."},
    {"Computation Errors", "Conversion Errors",
     "Calculation results converted into the final answer incorrectly."},
    {"Computation Errors", "Division Errors",
     "Quotients or remainders handled incorrectly."},
    {"Computation Errors", "Decimal Multiplication",
     "Decimals misaligned or mishandled in multiplication."},
    {"Computation Errors", "Fraction Comparison",
     "Fractions simplified or compared incorrectly."},
    {"Computation Errors", "Misapplied Models",
     "An inappropriate mathematical strategy or model is applied."},
    {"Knowledge Gaps", "Concepts Not Mastered",
     "Essential subject matter is not understood or remembered."},
};

} // namespace

Taxonomy::Taxonomy() {
    for (const SubtypeRow& row : kRows) {
        int type_id = -1;
        for (const ErrorType& t : types_) {
            if (t.name == row.type_name) {
                type_id = t.id;
                break;
            }
        }
        if (type_id < 0) {
            type_id = static_cast<int>(types_.size());
            types_.push_back({type_id, row.type_name});
            children_.emplace_back();
        }
        int subtype_id = static_cast<int>(subtypes_.size());
        subtypes_.push_back({subtype_id, row.subtype_name, row.definition, type_id});
        local_index_.push_back(static_cast<int>(children_[type_id].size()));
        children_[type_id].push_back(subtype_id);
    }
    assert(types_.size() == kNumTypes);
    assert(subtypes_.size() == kNumSubtypes);
}

const Taxonomy& Taxonomy::instance() {
    static const Taxonomy taxonomy;
    return taxonomy;
}

const ErrorType& Taxonomy::type(int id) const {
    if (id < 0 || id >= kNumTypes)
        raise(Status::InvalidArgument, "type id out of range: " + std::to_string(id));
    return types_[static_cast<size_t>(id)];
}

const ErrorSubtype& Taxonomy::subtype(int id) const {
    if (id < 0 || id >= kNumSubtypes)
        raise(Status::InvalidArgument, "subtype id out of range: " + std::to_string(id));
    return subtypes_[static_cast<size_t>(id)];
}

std::optional<int> Taxonomy::find_type(const std::string& name) const {
    const std::string key = normalize_whitespace(name);
    for (const ErrorType& t : types_)
        if (t.name == key) return t.id;
    return std::nullopt;
}

std::optional<int> Taxonomy::find_subtype(const std::string& name) const {
    const std::string key = normalize_whitespace(name);
    for (const ErrorSubtype& s : subtypes_)
        if (s.name == key) return s.id;
    return std::nullopt;
}

const ErrorType& Taxonomy::parent_of(const std::string& subtype_name) const {
    auto id = find_subtype(subtype_name);
    if (!id)
        raise(Status::UnknownSubtype, "unregistered subtype name: \"" + subtype_name + "\"");
    return types_[static_cast<size_t>(subtypes_[static_cast<size_t>(*id)].parent)];
}

const std::vector<int>& Taxonomy::subtypes_of(int type_id) const {
    type(type_id); // range check
    return children_[static_cast<size_t>(type_id)];
}

int Taxonomy::local_index(int subtype_id) const {
    subtype(subtype_id); // range check
    return local_index_[static_cast<size_t>(subtype_id)];
}

ErrorLabel Taxonomy::make_label(int type_id, int subtype_id) const {
    const ErrorSubtype& s = subtype(subtype_id);
    type(type_id);
    if (s.parent != type_id)
        raise(Status::LabelInconsistent,
              "subtype \"" + s.name + "\" does not belong to type \"" +
                  type(type_id).name + "\"");
    return ErrorLabel{type_id, subtype_id};
}

ErrorLabel Taxonomy::label_from_subtype(int subtype_id) const {
    const ErrorSubtype& s = subtype(subtype_id);
    return ErrorLabel{s.parent, subtype_id};
}

} // namespace seqdiag
