#include "codemie/util/hash.hpp"

#include "codemie/error.hpp"

#include <openssl/evp.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <memory>

namespace codemie::util {

namespace {

using DigestContext = std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)>;

std::string finish_hex(EVP_MD_CTX* ctx) {
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int len = 0;
    if (EVP_DigestFinal_ex(ctx, digest.data(), &len) != 1) {
        throw Error("sha256: digest finalization failed");
    }
    std::string hex(static_cast<std::size_t>(len) * 2, '0');
    for (unsigned int i = 0; i < len; ++i) {
        std::snprintf(hex.data() + i * 2, 3, "%02x", digest[i]);
    }
    return hex;
}

DigestContext make_sha256_ctx() {
    DigestContext ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
        throw Error("sha256: context initialization failed");
    }
    return ctx;
}

} // namespace

std::string sha256_hex(std::string_view data) {
    auto ctx = make_sha256_ctx();
    if (EVP_DigestUpdate(ctx.get(), data.data(), data.size()) != 1) {
        throw Error("sha256: update failed");
    }
    return finish_hex(ctx.get());
}

std::string sha256_file_hex(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("sha256: cannot open " + path.string());
    }
    auto ctx = make_sha256_ctx();
    std::array<char, 1 << 16> buffer;
    while (in) {
        in.read(buffer.data(), static_cast<std::streamsize>(buffer.size()));
        const auto got = in.gcount();
        if (got > 0 &&
            EVP_DigestUpdate(ctx.get(), buffer.data(), static_cast<std::size_t>(got)) != 1) {
            throw Error("sha256: update failed");
        }
    }
    return finish_hex(ctx.get());
}

std::string base64_encode(std::string_view data) {
    static const char* kAlphabet =
        "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
    std::string out;
    out.reserve((data.size() + 2) / 3 * 4);
    std::size_t i = 0;
    while (i + 2 < data.size()) {
        const unsigned a = static_cast<unsigned char>(data[i]);
        const unsigned b = static_cast<unsigned char>(data[i + 1]);
        const unsigned c = static_cast<unsigned char>(data[i + 2]);
        out.push_back(kAlphabet[a >> 2]);
        out.push_back(kAlphabet[((a & 0x3) << 4) | (b >> 4)]);
        out.push_back(kAlphabet[((b & 0xF) << 2) | (c >> 6)]);
        out.push_back(kAlphabet[c & 0x3F]);
        i += 3;
    }
    if (i + 1 == data.size()) {
        const unsigned a = static_cast<unsigned char>(data[i]);
        out.push_back(kAlphabet[a >> 2]);
        out.push_back(kAlphabet[(a & 0x3) << 4]);
        out += "==";
    } else if (i + 2 == data.size()) {
        const unsigned a = static_cast<unsigned char>(data[i]);
        const unsigned b = static_cast<unsigned char>(data[i + 1]);
        out.push_back(kAlphabet[a >> 2]);
        out.push_back(kAlphabet[((a & 0x3) << 4) | (b >> 4)]);
        out.push_back(kAlphabet[(b & 0xF) << 2]);
        out.push_back('=');
    }
    return out;
}

} // namespace codemie::util
