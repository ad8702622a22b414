#include "codemie/visual/embedding_io.hpp"

#include "codemie/error.hpp"

#include <json.hpp>

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

namespace codemie::visual {

namespace {

constexpr char kMagic[4] = {'C', 'M', 'E', 'B'};

void byteswap_f32(std::vector<float>& values) {
    for (float& v : values) {
        std::uint32_t bits;
        std::memcpy(&bits, &v, 4);
        bits = ((bits & 0x000000FFu) << 24) | ((bits & 0x0000FF00u) << 8) |
               ((bits & 0x00FF0000u) >> 8) | ((bits & 0xFF000000u) >> 24);
        std::memcpy(&v, &bits, 4);
    }
}

nlohmann::json header_json(std::size_t q, std::size_t n_p, std::size_t d_g) {
    return {{"q", q}, {"n_p", n_p}, {"d_g", d_g}, {"dtype", "f32"}, {"layout", "row-major"}};
}

void check_header(const nlohmann::json& header, PatchEmbeddings& emb) {
    if (header.value("dtype", "") != "f32") {
        throw DataError("embeddings: unsupported dtype");
    }
    if (header.value("layout", "") != "row-major") {
        throw DataError("embeddings: unsupported layout");
    }
    emb.q = header.at("q").get<std::size_t>();
    emb.n_p = header.at("n_p").get<std::size_t>();
    emb.d_g = header.at("d_g").get<std::size_t>();
    if (emb.q < 1 || emb.n_p < 1 || emb.d_g < 1) {
        throw DataError("embeddings: dimensions must be >= 1");
    }
}

PatchEmbeddings load_binary(std::ifstream& in, const std::filesystem::path& path) {
    std::uint8_t len_bytes[4];
    if (!in.read(reinterpret_cast<char*>(len_bytes), 4)) {
        throw DataError("embeddings: truncated header length in " + path.string());
    }
    const std::uint32_t header_len = static_cast<std::uint32_t>(len_bytes[0]) |
                                     (static_cast<std::uint32_t>(len_bytes[1]) << 8) |
                                     (static_cast<std::uint32_t>(len_bytes[2]) << 16) |
                                     (static_cast<std::uint32_t>(len_bytes[3]) << 24);
    if (header_len == 0 || header_len > (1u << 20)) {
        throw DataError("embeddings: implausible header length in " + path.string());
    }
    std::string header_text(header_len, '\0');
    if (!in.read(header_text.data(), header_len)) {
        throw DataError("embeddings: truncated header in " + path.string());
    }
    nlohmann::json header;
    try {
        header = nlohmann::json::parse(header_text);
    } catch (const nlohmann::json::exception& e) {
        throw DataError("embeddings: bad header in " + path.string() + ": " + e.what());
    }
    PatchEmbeddings emb;
    check_header(header, emb);
    const std::size_t count = emb.q * emb.n_p * emb.d_g;
    emb.data.resize(count);
    if (!in.read(reinterpret_cast<char*>(emb.data.data()),
                 static_cast<std::streamsize>(count * 4))) {
        throw DataError("embeddings: truncated tensor in " + path.string());
    }
    if (in.peek() != std::ifstream::traits_type::eof()) {
        throw DataError("embeddings: trailing bytes in " + path.string());
    }
    if constexpr (std::endian::native == std::endian::big) {
        byteswap_f32(emb.data);
    }
    return emb;
}

PatchEmbeddings load_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw DataError("embeddings: bad JSON in " + path.string() + ": " + e.what());
    }
    PatchEmbeddings emb;
    check_header(doc, emb);
    const auto& data = doc.at("data");
    if (!data.is_array() || data.size() != emb.q * emb.n_p * emb.d_g) {
        throw DataError("embeddings: data array size mismatch in " + path.string());
    }
    emb.data.reserve(data.size());
    for (const auto& v : data) {
        emb.data.push_back(v.get<float>());
    }
    return emb;
}

void write_binary(const std::filesystem::path& path,
                  const nlohmann::json& header,
                  const std::vector<float>& data) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw DataError("embeddings: cannot write " + path.string());
    }
    const std::string header_text = header.dump();
    const auto header_len = static_cast<std::uint32_t>(header_text.size());
    const std::uint8_t len_bytes[4] = {
        static_cast<std::uint8_t>(header_len & 0xFF),
        static_cast<std::uint8_t>((header_len >> 8) & 0xFF),
        static_cast<std::uint8_t>((header_len >> 16) & 0xFF),
        static_cast<std::uint8_t>((header_len >> 24) & 0xFF)};
    out.write(kMagic, 4);
    out.write(reinterpret_cast<const char*>(len_bytes), 4);
    out.write(header_text.data(), static_cast<std::streamsize>(header_text.size()));
    std::vector<float> payload = data;
    if constexpr (std::endian::native == std::endian::big) {
        byteswap_f32(payload);
    }
    out.write(reinterpret_cast<const char*>(payload.data()),
              static_cast<std::streamsize>(payload.size() * 4));
    if (!out) {
        throw DataError("embeddings: write failed for " + path.string());
    }
}

} // namespace

PatchEmbeddings load_embeddings(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("embeddings: cannot open " + path.string());
    }
    char magic[4] = {};
    in.read(magic, 4);
    if (in.gcount() == 4 && std::memcmp(magic, kMagic, 4) == 0) {
        return load_binary(in, path);
    }
    return load_json(path);
}

void save_embeddings_binary(const std::filesystem::path& path, const PatchEmbeddings& emb) {
    if (!emb.shape_valid()) {
        throw DataError("embeddings: invalid tensor shape");
    }
    write_binary(path, header_json(emb.q, emb.n_p, emb.d_g), emb.data);
}

void save_embeddings_json(const std::filesystem::path& path, const PatchEmbeddings& emb) {
    if (!emb.shape_valid()) {
        throw DataError("embeddings: invalid tensor shape");
    }
    nlohmann::json doc = header_json(emb.q, emb.n_p, emb.d_g);
    doc["data"] = emb.data;
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw DataError("embeddings: cannot write " + path.string());
    }
    out << doc.dump(2) << "\n";
    if (!out) {
        throw DataError("embeddings: write failed for " + path.string());
    }
}

void save_fused(const std::filesystem::path& path, const FusedFeatures& fused) {
    if (fused.data.size() != fused.q * fused.d_g) {
        throw DataError("embeddings: invalid fused shape");
    }
    write_binary(path, header_json(fused.q, 1, fused.d_g), fused.data);
}

} // namespace codemie::visual
