#include "agents/client.hpp"

#include "agents/prompting.hpp"
#include "common/error.hpp"
#include "common/rng.hpp"

#include <httplib.h>
#include <json.hpp>

#include <cstdlib>

namespace seqdiag::agents {

using json = nlohmann::json;

HttpChatClient::HttpChatClient(HttpClientConfig cfg) : cfg_(std::move(cfg)) {
    if (cfg_.url.empty())
        raise(Status::InvalidArgument, "chat client URL must not be empty");
}

std::string HttpChatClient::request_body(const std::string& prompt) const {
    json body;
    body["model"] = cfg_.model;
    body["messages"] = json::array({{{"role", "user"}, {"content", prompt}}});
    body["temperature"] = 0;
    return body.dump();
}

std::string HttpChatClient::parse_reply(const std::string& body) {
    json j = json::parse(body, nullptr, false);
    if (j.is_discarded())
        raise(Status::UnparseableResponse, "chat reply is not JSON");
    // Accept either the chat-completions shape or a bare message document.
    if (j.contains("choices") && j["choices"].is_array() && !j["choices"].empty()) {
        const auto& first = j["choices"][0];
        if (first.contains("message") && first["message"].contains("content"))
            return first["message"]["content"].get<std::string>();
        if (first.contains("content")) return first["content"].get<std::string>();
    }
    if (j.contains("message") && j["message"].contains("content"))
        return j["message"]["content"].get<std::string>();
    if (j.contains("content") && j["content"].is_string())
        return j["content"].get<std::string>();
    raise(Status::UnparseableResponse, "chat reply has no message content field");
}

std::string HttpChatClient::complete(const std::string& prompt) {
    // Split scheme://host[:port] from the path.
    size_t scheme_end = cfg_.url.find("://");
    if (scheme_end == std::string::npos)
        raise(Status::InvalidArgument, "URL needs a scheme: " + cfg_.url);
    size_t path_start = cfg_.url.find('/', scheme_end + 3);
    std::string origin =
        path_start == std::string::npos ? cfg_.url : cfg_.url.substr(0, path_start);
    std::string path = path_start == std::string::npos ? "/" : cfg_.url.substr(path_start);

    httplib::Client client(origin);
    client.set_connection_timeout(static_cast<time_t>(cfg_.timeout_seconds), 0);
    client.set_read_timeout(static_cast<time_t>(cfg_.timeout_seconds), 0);
    httplib::Headers headers;
    if (const char* key = std::getenv(cfg_.api_key_env.c_str()); key && *key)
        headers.emplace("Authorization", std::string("Bearer ") + key);

    std::string body = request_body(prompt);
    for (int attempt = 0; attempt <= cfg_.transport_retries; ++attempt) {
        auto res = client.Post(path, headers, body, "application/json");
        if (!res) continue;
        if (res->status != 200)
            raise(Status::ProviderFailure,
                  "chat endpoint returned HTTP " + std::to_string(res->status));
        return parse_reply(res->body);
    }
    raise(Status::ProviderFailure, "chat endpoint unreachable: " + cfg_.url);
}

StubChatClient::StubChatClient(StubPolicy policy, uint64_t seed)
    : policy_(policy), seed_(seed) {
    if (policy == StubPolicy::fixed)
        raise(Status::InvalidArgument, "fixed policy needs a label");
}

StubChatClient::StubChatClient(const ErrorLabel& fixed_label)
    : policy_(StubPolicy::fixed), fixed_label_(fixed_label) {}

std::string format_stub_reply(const ErrorLabel& label) {
    const Taxonomy& tax = Taxonomy::instance();
    const ErrorType& type = tax.type(label.type_id);
    const ErrorSubtype& sub = tax.subtype(label.subtype_id);
    return "THINKING: Comparing the attempt against the listed categories, the work "
           "pattern points to " + sub.name + ".\n"
           "ERROR_TYPE: " + type.name + "\n"
           "SUB_TYPE: " + sub.name + "\n"
           "REASON: The attempt shows " + sub.name + ": " + sub.definition +
           " This falls under " + type.name + ".\n"
           "SUGGESTION: Work through targeted exercises addressing " + sub.name +
           " and re-check for " + type.name + " before submitting.\n";
}

namespace {

// Type uniform over the 9, subtype uniform within the type; depends only on
// (seed, prompt) so identical calls give identical replies.
ErrorLabel seeded_label(uint64_t seed, const std::string& prompt) {
    const Taxonomy& tax = Taxonomy::instance();
    Rng rng(seed ^ fnv1a64(prompt));
    int type_id = static_cast<int>(rng.uniform_int(Taxonomy::kNumTypes));
    const auto& subs = tax.subtypes_of(type_id);
    int subtype_id = subs[static_cast<size_t>(rng.uniform_int(subs.size()))];
    return ErrorLabel{type_id, subtype_id};
}

} // namespace

std::string StubChatClient::complete(const std::string& prompt) {
    switch (policy_) {
    case StubPolicy::fixed:
        return format_stub_reply(fixed_label_);
    case StubPolicy::follow_hint:
        if (auto hint = extract_hint_labels(prompt)) return format_stub_reply(*hint);
        return format_stub_reply(seeded_label(seed_, prompt));
    case StubPolicy::ignore_hint:
        return format_stub_reply(seeded_label(seed_, prompt));
    }
    raise(Status::Internal, "unreachable stub policy");
}

std::string StubChatClient::describe() const {
    switch (policy_) {
    case StubPolicy::fixed: return "stub:fixed";
    case StubPolicy::follow_hint: return "stub:follow_hint";
    case StubPolicy::ignore_hint: return "stub:ignore_hint";
    }
    return "stub";
}

std::shared_ptr<ChatClient> make_stub_client(StubPolicy policy, uint64_t seed) {
    return std::make_shared<StubChatClient>(policy, seed);
}

std::shared_ptr<ChatClient> make_fixed_client(const ErrorLabel& label) {
    return std::make_shared<StubChatClient>(label);
}

} // namespace seqdiag::agents
