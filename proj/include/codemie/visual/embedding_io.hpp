#pragma once

#include "codemie/visual/features.hpp"

#include <filesystem>

namespace codemie::visual {

// Binary container: magic "CMEB", u32 little-endian header length, JSON
// header {q, n_p, d_g, dtype:"f32", layout:"row-major"}, then the raw
// little-endian f32 tensor. A JSON variant carries the flat tensor in a
// "data" array. load_embeddings sniffs the magic to pick the format.
PatchEmbeddings load_embeddings(const std::filesystem::path& path);

void save_embeddings_binary(const std::filesystem::path& path, const PatchEmbeddings& emb);
void save_embeddings_json(const std::filesystem::path& path, const PatchEmbeddings& emb);

// Fused q x d_g output is stored as a container with n_p = 1.
void save_fused(const std::filesystem::path& path, const FusedFeatures& fused);

} // namespace codemie::visual
