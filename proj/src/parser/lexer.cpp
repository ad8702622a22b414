#include "codemie/parser/lexer.hpp"

#include <cctype>

namespace codemie::parser {

namespace {

bool ident_start(unsigned char c) {
    return std::isalpha(c) != 0 || c == '_' || c >= 0x80;
}

bool ident_continue(unsigned char c) {
    return std::isalnum(c) != 0 || c == '_' || c >= 0x80;
}

} // namespace

const char* token_kind_name(TokenKind kind) {
    switch (kind) {
    case TokenKind::IDENT: return "IDENT";
    case TokenKind::STRING: return "STRING";
    case TokenKind::INT: return "INT";
    case TokenKind::FLOAT: return "FLOAT";
    case TokenKind::LBRACKET: return "LBRACKET";
    case TokenKind::RBRACKET: return "RBRACKET";
    case TokenKind::EQUALS: return "EQUALS";
    case TokenKind::COMMA: return "COMMA";
    case TokenKind::NEWLINE: return "NEWLINE";
    case TokenKind::JUNK: return "JUNK";
    }
    return "?";
}

std::vector<Token> tokenize(std::string_view text) {
    std::vector<Token> tokens;
    std::size_t pos = 0;
    int line = 1;
    int col = 1;

    auto push = [&](TokenKind kind, std::size_t start, std::size_t end, std::string value = {}) {
        tokens.push_back({kind, std::string(text.substr(start, end - start)), std::move(value),
                          line, col});
    };

    while (pos < text.size()) {
        const unsigned char c = static_cast<unsigned char>(text[pos]);
        const std::size_t start = pos;
        const int start_col = col;

        if (c == '\n') {
            tokens.push_back({TokenKind::NEWLINE, "\n", {}, line, col});
            ++pos;
            ++line;
            col = 1;
            continue;
        }
        if (c == ' ' || c == '\t' || c == '\r') {
            ++pos;
            ++col;
            continue;
        }
        if (c == '#') {
            while (pos < text.size() && text[pos] != '\n') {
                ++pos;
                ++col;
            }
            col = start_col;
            push(TokenKind::JUNK, start, pos);
            col = start_col + static_cast<int>(pos - start);
            continue;
        }
        if (c == '[') {
            push(TokenKind::LBRACKET, pos, pos + 1);
            ++pos;
            ++col;
            continue;
        }
        if (c == ']') {
            push(TokenKind::RBRACKET, pos, pos + 1);
            ++pos;
            ++col;
            continue;
        }
        if (c == '=') {
            push(TokenKind::EQUALS, pos, pos + 1);
            ++pos;
            ++col;
            continue;
        }
        if (c == ',') {
            push(TokenKind::COMMA, pos, pos + 1);
            ++pos;
            ++col;
            continue;
        }
        if (c == '"') {
            std::string value;
            std::size_t p = pos + 1;
            bool closed = false;
            while (p < text.size() && text[p] != '\n') {
                char d = text[p];
                if (d == '"') {
                    closed = true;
                    ++p;
                    break;
                }
                if (d == '\\' && p + 1 < text.size() && text[p + 1] != '\n') {
                    char e = text[p + 1];
                    switch (e) {
                    case '\\': value.push_back('\\'); break;
                    case '"': value.push_back('"'); break;
                    case 'n': value.push_back('\n'); break;
                    case 'r': value.push_back('\r'); break;
                    case 't': value.push_back('\t'); break;
                    default:
                        value.push_back('\\');
                        value.push_back(e);
                    }
                    p += 2;
                    continue;
                }
                value.push_back(d);
                ++p;
            }
            if (closed) {
                push(TokenKind::STRING, pos, p, std::move(value));
            } else {
                push(TokenKind::JUNK, pos, p);
            }
            col += static_cast<int>(p - pos);
            pos = p;
            continue;
        }
        if (std::isdigit(c) != 0 ||
            (c == '-' && pos + 1 < text.size() &&
             std::isdigit(static_cast<unsigned char>(text[pos + 1])) != 0)) {
            std::size_t p = pos + (c == '-' ? 1 : 0);
            while (p < text.size() && std::isdigit(static_cast<unsigned char>(text[p])) != 0) {
                ++p;
            }
            bool is_float = false;
            if (p + 1 < text.size() && text[p] == '.' &&
                std::isdigit(static_cast<unsigned char>(text[p + 1])) != 0) {
                is_float = true;
                ++p;
                while (p < text.size() && std::isdigit(static_cast<unsigned char>(text[p])) != 0) {
                    ++p;
                }
            }
            push(is_float ? TokenKind::FLOAT : TokenKind::INT, pos, p);
            col += static_cast<int>(p - pos);
            pos = p;
            continue;
        }
        if (ident_start(c)) {
            std::size_t p = pos + 1;
            while (p < text.size() && ident_continue(static_cast<unsigned char>(text[p]))) {
                ++p;
            }
            push(TokenKind::IDENT, pos, p);
            col += static_cast<int>(p - pos);
            pos = p;
            continue;
        }

        // Anything else: a maximal run of unrecognized bytes becomes one JUNK.
        std::size_t p = pos + 1;
        auto recognized = [](unsigned char b) {
            return b == '\n' || b == ' ' || b == '\t' || b == '\r' || b == '#' || b == '[' ||
                   b == ']' || b == '=' || b == ',' || b == '"' || std::isdigit(b) != 0 ||
                   b == '-' || ident_start(b);
        };
        while (p < text.size() && !recognized(static_cast<unsigned char>(text[p]))) {
            ++p;
        }
        push(TokenKind::JUNK, pos, p);
        col += static_cast<int>(p - pos);
        pos = p;
    }

    return tokens;
}

} // namespace codemie::parser
