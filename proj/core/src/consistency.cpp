#include "wowbench/consistency.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace wowbench {

std::string to_string(Region r) {
    switch (r) {
        case Region::Arm: return "arm";
        case Region::Object: return "object";
        case Region::Background: return "background";
    }
    return "arm";
}

Region region_from_string(const std::string& s) {
    if (s == "arm") return Region::Arm;
    if (s == "object") return Region::Object;
    if (s == "background") return Region::Background;
    throw std::invalid_argument("unknown region '" + s + "' (expected arm|object|background)");
}

std::string to_string(ConsistencyMode m) {
    return m == ConsistencyMode::Adjacent ? "adjacent" : "anchor_first";
}

double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw std::invalid_argument("cosine: dimension mismatch");
    if (a.empty()) throw std::invalid_argument("cosine: empty vectors");
    double dot = 0.0, aa = 0.0, bb = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        aa += a[i] * a[i];
        bb += b[i] * b[i];
    }
    if (aa == 0.0 || bb == 0.0) throw std::invalid_argument("cosine: zero vector");
    return dot / std::sqrt(aa * bb);
}

double regional_consistency(const RegionEmbeddingSequence& seq, ConsistencyMode mode) {
    const auto& frames = seq.frames;
    if (frames.size() < 2) {
        throw std::invalid_argument("regional_consistency: need at least 2 frames");
    }
    for (const auto& v : frames) {
        if (v.size() != frames.front().size()) {
            throw std::invalid_argument("regional_consistency: inconsistent embedding dimension");
        }
    }
    double sum = 0.0;
    const size_t pairs = frames.size() - 1;
    if (mode == ConsistencyMode::Adjacent) {
        for (size_t t = 0; t + 1 < frames.size(); ++t) {
            sum += cosine_similarity(frames[t], frames[t + 1]);
        }
    } else {
        for (size_t t = 1; t < frames.size(); ++t) {
            sum += cosine_similarity(frames.front(), frames[t]);
        }
    }
    return sum / static_cast<double>(pairs);
}

namespace {

void check_same_shape(const Frame& a, const Frame& b) {
    if (a.width != b.width || a.height != b.height || a.channels != b.channels) {
        throw std::invalid_argument("frame size mismatch");
    }
    const size_t expected = static_cast<size_t>(a.width) * static_cast<size_t>(a.height) *
                            static_cast<size_t>(a.channels);
    if (a.data.size() != expected || b.data.size() != expected) {
        throw std::invalid_argument("frame buffer does not match its dimensions");
    }
    if (a.width <= 0 || a.height <= 0 || a.channels <= 0) {
        throw std::invalid_argument("frame has empty dimensions");
    }
}

}  // namespace

double mse(const Frame& reference, const Frame& test) {
    check_same_shape(reference, test);
    double sum = 0.0;
    for (size_t i = 0; i < reference.data.size(); ++i) {
        const double diff = static_cast<double>(reference.data[i]) - static_cast<double>(test.data[i]);
        sum += diff * diff;
    }
    return sum / static_cast<double>(reference.data.size());
}

double psnr_from_mse(double mse_value) {
    if (mse_value == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(255.0 * 255.0 / mse_value);
}

double psnr(const Frame& reference, const Frame& test) {
    return psnr_from_mse(mse(reference, test));
}

namespace {

constexpr int kWindow = 11;
constexpr double kSigma = 1.5;
constexpr double kC1 = (0.01 * 255.0) * (0.01 * 255.0);
constexpr double kC2 = (0.03 * 255.0) * (0.03 * 255.0);

// Normalized 1D Gaussian taps; the separable product reproduces the 11x11
// window.
std::vector<double> gaussian_taps() {
    std::vector<double> taps(kWindow);
    double sum = 0.0;
    for (int i = 0; i < kWindow; ++i) {
        const double d = static_cast<double>(i - kWindow / 2);
        taps[static_cast<size_t>(i)] = std::exp(-(d * d) / (2.0 * kSigma * kSigma));
        sum += taps[static_cast<size_t>(i)];
    }
    for (auto& t : taps) t /= sum;
    return taps;
}

// Valid-mode separable convolution: horizontal pass then vertical pass.
std::vector<double> convolve_valid(const std::vector<double>& img, int w, int h,
                                   const std::vector<double>& taps, int* out_w, int* out_h) {
    const int vw = w - kWindow + 1;
    const int vh = h - kWindow + 1;
    std::vector<double> horz(static_cast<size_t>(vw) * static_cast<size_t>(h), 0.0);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < vw; ++x) {
            double acc = 0.0;
            for (int k = 0; k < kWindow; ++k) {
                acc += taps[static_cast<size_t>(k)] * img[static_cast<size_t>(y) * w + x + k];
            }
            horz[static_cast<size_t>(y) * vw + x] = acc;
        }
    }
    std::vector<double> out(static_cast<size_t>(vw) * static_cast<size_t>(vh), 0.0);
    for (int y = 0; y < vh; ++y) {
        for (int x = 0; x < vw; ++x) {
            double acc = 0.0;
            for (int k = 0; k < kWindow; ++k) {
                acc += taps[static_cast<size_t>(k)] * horz[static_cast<size_t>(y + k) * vw + x];
            }
            out[static_cast<size_t>(y) * vw + x] = acc;
        }
    }
    *out_w = vw;
    *out_h = vh;
    return out;
}

}  // namespace

double ssim(const Frame& reference, const Frame& test) {
    check_same_shape(reference, test);
    if (reference.width < kWindow || reference.height < kWindow) {
        throw std::invalid_argument("ssim: frames smaller than the 11x11 window");
    }

    const std::vector<double> taps = gaussian_taps();
    const int w = reference.width;
    const int h = reference.height;
    const size_t plane = static_cast<size_t>(w) * static_cast<size_t>(h);

    double channel_sum = 0.0;
    for (int c = 0; c < reference.channels; ++c) {
        std::vector<double> x(plane), y(plane), xx(plane), yy(plane), xy(plane);
        for (size_t i = 0; i < plane; ++i) {
            const double xv = static_cast<double>(reference.data[static_cast<size_t>(c) * plane + i]);
            const double yv = static_cast<double>(test.data[static_cast<size_t>(c) * plane + i]);
            x[i] = xv;
            y[i] = yv;
            xx[i] = xv * xv;
            yy[i] = yv * yv;
            xy[i] = xv * yv;
        }
        int vw = 0, vh = 0;
        const std::vector<double> mx = convolve_valid(x, w, h, taps, &vw, &vh);
        const std::vector<double> my = convolve_valid(y, w, h, taps, &vw, &vh);
        const std::vector<double> mxx = convolve_valid(xx, w, h, taps, &vw, &vh);
        const std::vector<double> myy = convolve_valid(yy, w, h, taps, &vw, &vh);
        const std::vector<double> mxy = convolve_valid(xy, w, h, taps, &vw, &vh);

        double local_sum = 0.0;
        const size_t count = static_cast<size_t>(vw) * static_cast<size_t>(vh);
        for (size_t i = 0; i < count; ++i) {
            const double var_x = mxx[i] - mx[i] * mx[i];
            const double var_y = myy[i] - my[i] * my[i];
            const double cov = mxy[i] - mx[i] * my[i];
            const double numerator = (2.0 * mx[i] * my[i] + kC1) * (2.0 * cov + kC2);
            const double denominator = (mx[i] * mx[i] + my[i] * my[i] + kC1) * (var_x + var_y + kC2);
            local_sum += numerator / denominator;
        }
        channel_sum += local_sum / static_cast<double>(count);
    }
    return channel_sum / static_cast<double>(reference.channels);
}

}  // namespace wowbench
