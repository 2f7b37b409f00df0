#include "agents/orchestrate.hpp"

#include "common/error.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

namespace seqdiag::agents {

TimeAgentOutput time_agent_predict(const HistoryWindow& window,
                                   const model::TsModel& ts_model,
                                   const model::EncoderProvider& provider,
                                   bool include_confidence) {
    model::Prediction pred = ts_model.predict(model::featurize(window, provider));
    return render_hint(pred, include_confidence);
}

AgentReport orchestrate(const std::vector<HistoryWindow>& windows,
                        const model::TsModel* ts_model,
                        const model::EncoderProvider* provider, ChatClient& client,
                        const eval::Judge& judge, const OrchestratorConfig& cfg) {
    if (cfg.with_time_agent && (!ts_model || !provider))
        raise(Status::InvalidArgument,
              "time-agent condition requires a model and a provider");

    std::ofstream transcript;
    if (!cfg.transcript_path.empty()) {
        transcript.open(cfg.transcript_path, std::ios::binary);
        if (!transcript)
            raise(Status::IoError, "cannot open transcript: " + cfg.transcript_path);
    }

    AgentReport report;
    size_t correct_type = 0, correct_sub = 0, adopted = 0, hinted = 0;
    double reason_sum = 0.0, suggestion_sum = 0.0;

    for (size_t i = 0; i < windows.size(); ++i) {
        const HistoryWindow& w = windows[i];
        if (!w.truth.label)
            raise(Status::InvalidArgument, "window " + std::to_string(i) +
                                               " has no ground-truth label");
        try {
            std::optional<TimeAgentOutput> hint;
            if (cfg.with_time_agent)
                hint = time_agent_predict(w, *ts_model, *provider, cfg.include_confidence);

            const std::string prompt = build_prompt(w.query, hint);
            const std::string reply = client.complete(prompt);
            if (transcript.is_open()) {
                nlohmann::ordered_json line;
                line["index"] = i;
                line["student_id"] = w.student_id;
                line["prompt"] = prompt;
                line["reply"] = reply;
                transcript << line.dump() << "\n";
            }

            Diagnosis diag = parse_response(reply);
            if (hint) {
                diag.adopted_hint = diag.type_id == hint->prediction.type_id;
                ++hinted;
                if (*diag.adopted_hint) ++adopted;
            }
            if (diag.repaired_parent) ++report.n_repaired;

            if (diag.type_id == w.truth.label->type_id) ++correct_type;
            if (diag.subtype_id == w.truth.label->subtype_id) ++correct_sub;
            reason_sum +=
                judge.score(diag.reason, w.truth.reason_text.value_or("")).score;
            suggestion_sum +=
                judge.score(diag.suggestion, w.truth.suggestion_text.value_or("")).score;
            ++report.n_samples;
        } catch (const Error&) {
            ++report.n_failures;
        }
    }

    if (report.n_samples > 0) {
        const double n = static_cast<double>(report.n_samples);
        report.acc_type = static_cast<double>(correct_type) / n;
        report.acc_subtype = static_cast<double>(correct_sub) / n;
        report.mean_reasoning_score = reason_sum / n;
        report.mean_suggestion_score = suggestion_sum / n;
    }
    if (cfg.with_time_agent && hinted > 0)
        report.adoption_rate = static_cast<double>(adopted) / static_cast<double>(hinted);
    return report;
}

std::string agent_report_csv(const std::vector<AgentReportRow>& rows) {
    std::ostringstream out;
    out << "condition,client,acc_type,acc_subtype,reasoning_score,suggestion_score,"
           "adoption_rate,samples,failures\n";
    char buf[256];
    for (const AgentReportRow& r : rows) {
        std::string adoption = r.report.adoption_rate
                                   ? (std::snprintf(buf, sizeof(buf), "%.4f",
                                                    *r.report.adoption_rate),
                                      std::string(buf))
                                   : std::string("");
        std::snprintf(buf, sizeof(buf), "%.4f,%.4f,%.4f,%.4f", r.report.acc_type,
                      r.report.acc_subtype, r.report.mean_reasoning_score,
                      r.report.mean_suggestion_score);
        out << r.condition << "," << r.client_name << "," << buf << "," << adoption << ","
            << r.report.n_samples << "," << r.report.n_failures << "\n";
    }
    return out.str();
}

std::string agent_report_table(const std::vector<AgentReportRow>& rows) {
    std::ostringstream out;
    char line[256];
    std::snprintf(line, sizeof(line), "%-18s %-18s %9s %12s %10s %11s %9s\n",
                  "Condition", "Model", "Acc-Type", "Acc-Subtype", "Reasoning",
                  "Suggestion", "Adoption");
    out << line;
    for (const AgentReportRow& r : rows) {
        char adoption[16] = "-";
        if (r.report.adoption_rate)
            std::snprintf(adoption, sizeof(adoption), "%.4f", *r.report.adoption_rate);
        std::snprintf(line, sizeof(line), "%-18s %-18s %9.4f %12.4f %10.4f %11.4f %9s\n",
                      r.condition.c_str(), r.client_name.c_str(), r.report.acc_type,
                      r.report.acc_subtype, r.report.mean_reasoning_score,
                      r.report.mean_suggestion_score, adoption);
        out << line;
    }
    return out.str();
}

} // namespace seqdiag::agents
