#pragma once

#include <string>
#include <vector>

namespace seqdiag {

/// Trim leading/trailing whitespace and collapse internal runs to one space.
std::string normalize_whitespace(const std::string& s);

std::string to_lower(const std::string& s);

/// Lowercased, punctuation-stripped word tokens.
std::vector<std::string> word_tokens(const std::string& s);

bool contains(const std::string& haystack, const std::string& needle);

} // namespace seqdiag
