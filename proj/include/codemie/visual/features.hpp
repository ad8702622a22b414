#pragma once

#include <cstddef>
#include <vector>

namespace codemie::visual {

// Dense q x n_p x d_g patch-embedding tensor, row-major f32.
struct PatchEmbeddings {
    std::size_t q = 0;
    std::size_t n_p = 0;
    std::size_t d_g = 0;
    std::vector<float> data;

    float at(std::size_t image, std::size_t patch, std::size_t dim) const {
        return data[(image * n_p + patch) * d_g + dim];
    }
    bool shape_valid() const { return q >= 1 && n_p >= 1 && d_g >= 1 && data.size() == q * n_p * d_g; }
};

// q x d_g fused output: per-image average over patches plus the positional
// row.
struct FusedFeatures {
    std::size_t q = 0;
    std::size_t d_g = 0;
    std::vector<float> data;

    float at(std::size_t image, std::size_t dim) const { return data[image * d_g + dim]; }
};

// Interleaved sine/cosine position encoding, row i encodes index i. d_g must
// be even. Row-major q x d_g.
std::vector<float> sinusoidal_positions(std::size_t q, std::size_t d_g);

// Mean over the patch axis, accumulated in double and divided once, plus the
// positional row. positions must hold q * d_g floats.
FusedFeatures fuse(const PatchEmbeddings& patches, const std::vector<float>& positions);

} // namespace codemie::visual
