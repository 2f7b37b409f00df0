#pragma once

#include "core/taxonomy.hpp"

#include <cstdint>
#include <memory>
#include <string>

namespace seqdiag::agents {

/// Pure request/response completion interface; implementations keep no
/// state between calls.
class ChatClient {
public:
    virtual ~ChatClient() = default;
    virtual std::string complete(const std::string& prompt) = 0;
    virtual std::string describe() const = 0;
};

/// OpenAI-style chat endpoint: POST {"model", "messages", "temperature": 0}
/// to a configured URL, reply taken from the first message content field.
/// The API key is read from the environment.
struct HttpClientConfig {
    std::string url; // full endpoint URL, e.g. http://host:8000/v1/chat/completions
    std::string model = "gpt-4o";
    double timeout_seconds = 30.0;
    int transport_retries = 1;
    std::string api_key_env = "SEQDIAG_API_KEY";
};

class HttpChatClient : public ChatClient {
public:
    explicit HttpChatClient(HttpClientConfig cfg);

    std::string complete(const std::string& prompt) override;
    std::string describe() const override { return "http:" + cfg_.url; }

    /// Request body for one prompt (exposed for tests).
    std::string request_body(const std::string& prompt) const;

    /// Extract the first message content field from a reply document.
    static std::string parse_reply(const std::string& body);

private:
    HttpClientConfig cfg_;
};

enum class StubPolicy { follow_hint, ignore_hint, fixed };

/// Offline deterministic client. follow_hint echoes the hint labels when the
/// prompt carries a hint block, otherwise answers a seeded random valid
/// label; ignore_hint always answers a seeded random valid label (type
/// uniform over the 9, subtype uniform within the type); fixed always
/// answers the given label. Replies use the parseable line format.
class StubChatClient : public ChatClient {
public:
    StubChatClient(StubPolicy policy, uint64_t seed);
    explicit StubChatClient(const ErrorLabel& fixed_label);

    std::string complete(const std::string& prompt) override;
    std::string describe() const override;

private:
    StubPolicy policy_;
    uint64_t seed_ = 0;
    ErrorLabel fixed_label_;
};

std::shared_ptr<ChatClient> make_stub_client(StubPolicy policy, uint64_t seed);
std::shared_ptr<ChatClient> make_fixed_client(const ErrorLabel& label);

/// Formatted reply in the exact line protocol the parser expects.
std::string format_stub_reply(const ErrorLabel& label);

} // namespace seqdiag::agents
