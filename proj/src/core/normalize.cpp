#include "codemie/core/normalize.hpp"

#include <unicode/unorm2.h>
#include <unicode/ustring.h>
#include <unicode/utf8.h>

#include <cctype>

namespace codemie::core {

namespace {

bool is_collapsible_space(char32_t c) {
    return c == U' ' || c == U'\t' || c == U'\n' || c == U'\r' || c == U'\f' || c == U'\v';
}

} // namespace

std::string nfc(std::string_view s) {
    if (s.empty()) {
        return {};
    }
    UErrorCode ec = U_ZERO_ERROR;
    const UNormalizer2* norm = unorm2_getNFCInstance(&ec);
    if (U_FAILURE(ec) || norm == nullptr) {
        return std::string(s);
    }

    std::u16string utf16(s.size() + 1, u'\0');
    int32_t len16 = 0;
    ec = U_ZERO_ERROR;
    u_strFromUTF8(utf16.data(), static_cast<int32_t>(utf16.size()), &len16,
                  s.data(), static_cast<int32_t>(s.size()), &ec);
    if (U_FAILURE(ec)) {
        return std::string(s);
    }
    utf16.resize(static_cast<size_t>(len16));

    std::u16string normalized(utf16.size() * 3 + 16, u'\0');
    ec = U_ZERO_ERROR;
    int32_t norm_len = unorm2_normalize(norm, utf16.data(), len16,
                                        normalized.data(), static_cast<int32_t>(normalized.size()), &ec);
    if (U_FAILURE(ec)) {
        return std::string(s);
    }
    normalized.resize(static_cast<size_t>(norm_len));

    std::string out(normalized.size() * 4 + 4, '\0');
    int32_t len8 = 0;
    ec = U_ZERO_ERROR;
    u_strToUTF8(out.data(), static_cast<int32_t>(out.size()), &len8,
                normalized.data(), norm_len, &ec);
    if (U_FAILURE(ec)) {
        return std::string(s);
    }
    out.resize(static_cast<size_t>(len8));
    return out;
}

std::string normalize_surface(std::string_view s) {
    const std::string composed = nfc(s);
    std::string out;
    out.reserve(composed.size());
    bool pending_space = false;
    bool seen_content = false;
    size_t i = 0;
    while (i < composed.size()) {
        const unsigned char byte = static_cast<unsigned char>(composed[i]);
        if (byte < 0x80 && is_collapsible_space(static_cast<char32_t>(byte))) {
            pending_space = seen_content;
            ++i;
            continue;
        }
        if (pending_space) {
            out.push_back(' ');
            pending_space = false;
        }
        seen_content = true;
        out.push_back(composed[i]);
        ++i;
    }
    return out;
}

bool surfaces_equal(std::string_view a, std::string_view b) {
    return normalize_surface(a) == normalize_surface(b);
}

std::vector<char32_t> to_codepoints(std::string_view s) {
    std::vector<char32_t> out;
    out.reserve(s.size());
    int32_t i = 0;
    const int32_t len = static_cast<int32_t>(s.size());
    const uint8_t* bytes = reinterpret_cast<const uint8_t*>(s.data());
    while (i < len) {
        UChar32 c = 0;
        U8_NEXT(bytes, i, len, c);
        if (c < 0) {
            c = 0xFFFD;
        }
        out.push_back(static_cast<char32_t>(c));
    }
    return out;
}

} // namespace codemie::core
