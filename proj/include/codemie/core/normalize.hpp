#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace codemie::core {

// Unicode NFC. Invalid UTF-8 is passed through unchanged.
std::string nfc(std::string_view s);

// Canonical surface form used for all mention/entity identity checks:
// NFC, whitespace runs collapsed to a single space, trimmed. Case is
// preserved ("US" and "us" stay distinct).
std::string normalize_surface(std::string_view s);

bool surfaces_equal(std::string_view a, std::string_view b);

// Decodes UTF-8 into codepoints; invalid bytes decode as U+FFFD.
std::vector<char32_t> to_codepoints(std::string_view s);

} // namespace codemie::core
