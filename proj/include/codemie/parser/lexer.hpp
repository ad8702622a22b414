#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace codemie::parser {

enum class TokenKind {
    IDENT,
    STRING,
    INT,
    FLOAT,
    LBRACKET,
    RBRACKET,
    EQUALS,
    COMMA,
    NEWLINE,
    JUNK,
};

const char* token_kind_name(TokenKind kind);

struct Token {
    TokenKind kind;
    std::string lexeme; // raw source span
    std::string value;  // unescaped content for STRING tokens
    int line = 1;
    int col = 1;
};

// Total over arbitrary bytes. Whitespace between tokens is skipped; every
// other byte lands in exactly one token. Unrecognized spans and unterminated
// strings become JUNK, as do # comments (lexeme keeps the leading #).
std::vector<Token> tokenize(std::string_view text);

} // namespace codemie::parser
