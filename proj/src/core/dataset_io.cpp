#include "core/dataset_io.hpp"

#include "common/error.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace seqdiag {

using ordered_json = nlohmann::ordered_json;

namespace {

ordered_json attempt_to_json(const AttemptRecord& a) {
    ordered_json j;
    j["timestamp"] = a.timestamp;
    j["problem"] = a.problem_text;
    j["correct_answer"] = a.correct_answer;
    j["student_answer"] = a.student_answer;
    j["analysis"] = a.analysis_text;
    j["draft_ref"] = a.draft_ref;
    if (a.label) {
        const Taxonomy& tax = Taxonomy::instance();
        j["label"] = {{"type", tax.type(a.label->type_id).name},
                      {"subtype", tax.subtype(a.label->subtype_id).name}};
    } else {
        j["label"] = nullptr;
    }
    j["reason"] = a.reason_text ? ordered_json(*a.reason_text) : ordered_json(nullptr);
    j["suggestion"] =
        a.suggestion_text ? ordered_json(*a.suggestion_text) : ordered_json(nullptr);
    return j;
}

AttemptRecord attempt_from_json(const ordered_json& j, const std::string& student_id,
                                int line_number) {
    auto fail = [line_number](const std::string& what) -> void {
        raise(Status::DecodeError,
              "line " + std::to_string(line_number) + ": " + what);
    };

    AttemptRecord a;
    a.student_id = student_id;
    try {
        a.timestamp = j.at("timestamp").get<int64_t>();
        a.problem_text = j.at("problem").get<std::string>();
        a.correct_answer = j.at("correct_answer").get<std::string>();
        a.student_answer = j.at("student_answer").get<std::string>();
        a.analysis_text = j.at("analysis").get<std::string>();
        a.draft_ref = j.at("draft_ref").get<std::string>();
    } catch (const ordered_json::exception& e) {
        fail(e.what());
    }

    const auto& label = j.contains("label") ? j.at("label") : ordered_json(nullptr);
    if (!label.is_null()) {
        const Taxonomy& tax = Taxonomy::instance();
        std::string type_name, subtype_name;
        try {
            type_name = label.at("type").get<std::string>();
            subtype_name = label.at("subtype").get<std::string>();
        } catch (const ordered_json::exception& e) {
            fail(e.what());
        }
        auto type_id = tax.find_type(type_name);
        auto subtype_id = tax.find_subtype(subtype_name);
        if (!type_id) fail("unknown error type \"" + type_name + "\"");
        if (!subtype_id) fail("unknown error subtype \"" + subtype_name + "\"");
        if (tax.subtype(*subtype_id).parent != *type_id)
            fail("label parent mismatch: \"" + subtype_name + "\" is not a \"" +
                 type_name + "\" subtype");
        a.label = ErrorLabel{*type_id, *subtype_id};
    }

    auto opt_string = [&](const char* key) -> std::optional<std::string> {
        if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
        if (!j.at(key).is_string()) fail(std::string(key) + " must be a string or null");
        return j.at(key).get<std::string>();
    };
    a.reason_text = opt_string("reason");
    a.suggestion_text = opt_string("suggestion");
    return a;
}

} // namespace

std::string trajectory_to_json_line(const StudentTrajectory& t) {
    ordered_json j;
    j["student_id"] = t.student_id;
    j["attempts"] = ordered_json::array();
    for (const AttemptRecord& a : t.attempts) j["attempts"].push_back(attempt_to_json(a));
    return j.dump();
}

StudentTrajectory trajectory_from_json_line(const std::string& line, int line_number) {
    ordered_json j = ordered_json::parse(line, nullptr, false);
    if (j.is_discarded())
        raise(Status::DecodeError,
              "line " + std::to_string(line_number) + ": malformed JSON");
    StudentTrajectory t;
    try {
        t.student_id = j.at("student_id").get<std::string>();
        if (!j.at("attempts").is_array())
            raise(Status::DecodeError,
                  "line " + std::to_string(line_number) + ": attempts must be an array");
    } catch (const ordered_json::exception& e) {
        raise(Status::DecodeError,
              "line " + std::to_string(line_number) + ": " + e.what());
    }
    for (const auto& item : j.at("attempts"))
        t.attempts.push_back(attempt_from_json(item, t.student_id, line_number));
    return t;
}

void write_dataset(const Dataset& dataset, std::ostream& out) {
    for (const StudentTrajectory& t : dataset) out << trajectory_to_json_line(t) << "\n";
}

Dataset read_dataset(std::istream& in) {
    Dataset dataset;
    std::string line;
    int line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (line.empty()) continue;
        dataset.push_back(trajectory_from_json_line(line, line_number));
    }
    return dataset;
}

void save_dataset(const Dataset& dataset, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(Status::IoError, "cannot open for writing: " + path);
    write_dataset(dataset, out);
    if (!out) raise(Status::IoError, "write failed: " + path);
}

Dataset load_dataset(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(Status::IoError, "cannot open for reading: " + path);
    return read_dataset(in);
}

} // namespace seqdiag
