#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace wowbench {

enum class Region { Arm, Object, Background };
enum class ConsistencyMode { Adjacent, AnchorFirst };

std::string to_string(Region r);
Region region_from_string(const std::string& s);
std::string to_string(ConsistencyMode m);

/// Per-frame feature vectors for one masked region. All vectors must share
/// one dimension and none may be the zero vector.
struct RegionEmbeddingSequence {
    Region region = Region::Arm;
    std::vector<std::vector<double>> frames;
};

/// 8-bit image stored planar (channel-major): data[c*w*h + y*w + x].
struct Frame {
    int width = 0;
    int height = 0;
    int channels = 0;
    std::vector<std::uint8_t> data;
};

/// Throws std::invalid_argument on dimension mismatch or a zero vector.
double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b);

/// Adjacent: mean over t of cos(v_t, v_{t+1}); AnchorFirst: mean over t >= 2
/// of cos(v_1, v_t). Requires at least 2 frames.
double regional_consistency(const RegionEmbeddingSequence& seq, ConsistencyMode mode);

/// Mean squared error over all pixels and channels. Throws on size mismatch.
double mse(const Frame& reference, const Frame& test);

/// 10*log10(255^2 / mse); +infinity when mse == 0 (the anchor truncation
/// pre-scales the sentinel to 1.0 downstream).
double psnr_from_mse(double mse_value);
double psnr(const Frame& reference, const Frame& test);

/// Single-scale SSIM: 11x11 Gaussian window (sigma 1.5), K1=0.01, K2=0.03,
/// dynamic range 255, computed per channel over valid window positions, then
/// averaged across channels. Requires min(width, height) >= 11.
double ssim(const Frame& reference, const Frame& test);

}  // namespace wowbench
