#include "codemie/visual/features.hpp"

#include "codemie/error.hpp"

#include <cmath>

namespace codemie::visual {

std::vector<float> sinusoidal_positions(std::size_t q, std::size_t d_g) {
    if (q < 1) {
        throw DataError("positions: q must be >= 1");
    }
    if (d_g < 2 || d_g % 2 != 0) {
        throw DataError("positions: d_g must be even and >= 2");
    }
    std::vector<float> out(q * d_g);
    for (std::size_t i = 0; i < q; ++i) {
        for (std::size_t k = 0; k < d_g / 2; ++k) {
            const double rate =
                std::pow(10000.0, -2.0 * static_cast<double>(k) / static_cast<double>(d_g));
            const double angle = static_cast<double>(i) * rate;
            out[i * d_g + 2 * k] = static_cast<float>(std::sin(angle));
            out[i * d_g + 2 * k + 1] = static_cast<float>(std::cos(angle));
        }
    }
    return out;
}

FusedFeatures fuse(const PatchEmbeddings& patches, const std::vector<float>& positions) {
    if (!patches.shape_valid()) {
        throw DataError("fuse: invalid patch tensor shape");
    }
    if (positions.size() != patches.q * patches.d_g) {
        throw DataError("fuse: positions shape mismatch");
    }
    for (float v : patches.data) {
        if (!std::isfinite(v)) {
            throw DataError("fuse: non-finite patch value");
        }
    }
    for (float v : positions) {
        if (!std::isfinite(v)) {
            throw DataError("fuse: non-finite position value");
        }
    }

    FusedFeatures out;
    out.q = patches.q;
    out.d_g = patches.d_g;
    out.data.resize(patches.q * patches.d_g);
    for (std::size_t i = 0; i < patches.q; ++i) {
        for (std::size_t d = 0; d < patches.d_g; ++d) {
            double sum = 0.0;
            for (std::size_t j = 0; j < patches.n_p; ++j) {
                sum += static_cast<double>(patches.at(i, j, d));
            }
            const double mean = sum / static_cast<double>(patches.n_p);
            out.data[i * patches.d_g + d] =
                static_cast<float>(mean + static_cast<double>(positions[i * patches.d_g + d]));
        }
    }
    return out;
}

} // namespace codemie::visual
