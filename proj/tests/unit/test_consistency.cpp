#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>

#include "support/oracles.hpp"
#include "wowbench/consistency.hpp"
#include "wowbench/normalization.hpp"

using namespace wowbench;

namespace {

RegionEmbeddingSequence seq(std::vector<std::vector<double>> frames, Region region = Region::Arm) {
    RegionEmbeddingSequence s;
    s.region = region;
    s.frames = std::move(frames);
    return s;
}

Frame constant_frame(int w, int h, int channels, std::uint8_t value) {
    Frame f;
    f.width = w;
    f.height = h;
    f.channels = channels;
    f.data.assign(static_cast<size_t>(w) * h * channels, value);
    return f;
}

Frame checker_frame(int w, int h) {
    Frame f;
    f.width = w;
    f.height = h;
    f.channels = 1;
    f.data.resize(static_cast<size_t>(w) * h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            f.data[static_cast<size_t>(y) * w + x] = ((x + y) % 2) ? 255 : 0;
        }
    }
    return f;
}

Frame negate(const Frame& f) {
    Frame out = f;
    for (auto& v : out.data) v = static_cast<std::uint8_t>(255 - v);
    return out;
}

std::vector<double> plane_as_double(const Frame& f) {
    std::vector<double> out(f.data.size());
    for (size_t i = 0; i < f.data.size(); ++i) out[i] = f.data[i];
    return out;
}

}  // namespace

TEST_CASE("regional consistency of a static sequence is exactly 1") {
    const auto s = seq({{1, 2, 3}, {1, 2, 3}, {1, 2, 3}});
    CHECK(regional_consistency(s, ConsistencyMode::Adjacent) == 1.0);
    CHECK(regional_consistency(s, ConsistencyMode::AnchorFirst) == 1.0);
}

TEST_CASE("orthogonal vectors give zero consistency") {
    const auto s = seq({{1, 0}, {0, 1}});
    CHECK(regional_consistency(s, ConsistencyMode::Adjacent) == 0.0);
    CHECK(regional_consistency(s, ConsistencyMode::AnchorFirst) == 0.0);
}

TEST_CASE("consistency matches a definitional oracle on random vectors") {
    oracle::Rng rng(99);
    for (int iter = 0; iter < 30; ++iter) {
        std::vector<std::vector<double>> frames;
        const int dim = rng.uniform_int(2, 6);
        for (int t = 0; t < 3; ++t) {
            std::vector<double> v;
            for (int d = 0; d < dim; ++d) v.push_back(rng.uniform(-1, 1) + 0.01);
            frames.push_back(v);
        }
        auto dot = [](const std::vector<double>& a, const std::vector<double>& b) {
            double s = 0;
            for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
            return s;
        };
        auto cos_oracle = [&](const std::vector<double>& a, const std::vector<double>& b) {
            return dot(a, b) / (std::sqrt(dot(a, a)) * std::sqrt(dot(b, b)));
        };
        const double adjacent_expected =
            0.5 * (cos_oracle(frames[0], frames[1]) + cos_oracle(frames[1], frames[2]));
        const double anchor_expected =
            0.5 * (cos_oracle(frames[0], frames[1]) + cos_oracle(frames[0], frames[2]));
        const auto s = seq(frames);
        CHECK(regional_consistency(s, ConsistencyMode::Adjacent) ==
              doctest::Approx(adjacent_expected).epsilon(1e-12));
        CHECK(regional_consistency(s, ConsistencyMode::AnchorFirst) ==
              doctest::Approx(anchor_expected).epsilon(1e-12));
    }
}

TEST_CASE("consistency is invariant to positive per-frame scaling") {
    oracle::Rng rng(100);
    for (int iter = 0; iter < 20; ++iter) {
        std::vector<std::vector<double>> frames, scaled;
        for (int t = 0; t < 4; ++t) {
            std::vector<double> v, w;
            const double scale = rng.uniform(0.1, 9.0);
            for (int d = 0; d < 5; ++d) {
                const double c = rng.uniform(-2, 2) + 0.01;
                v.push_back(c);
                w.push_back(c * scale);
            }
            frames.push_back(v);
            scaled.push_back(w);
        }
        for (const auto mode : {ConsistencyMode::Adjacent, ConsistencyMode::AnchorFirst}) {
            CHECK(regional_consistency(seq(frames), mode) ==
                  doctest::Approx(regional_consistency(seq(scaled), mode)).epsilon(1e-12));
        }
    }
}

TEST_CASE("consistency error paths") {
    CHECK_THROWS_AS(regional_consistency(seq({{1, 2}}), ConsistencyMode::Adjacent),
                    std::invalid_argument);
    CHECK_THROWS_AS(regional_consistency(seq({{1, 2}, {0, 0}}), ConsistencyMode::Adjacent),
                    std::invalid_argument);
    CHECK_THROWS_AS(regional_consistency(seq({{1, 2}, {1, 2, 3}}), ConsistencyMode::Adjacent),
                    std::invalid_argument);
}

TEST_CASE("psnr") {
    const Frame zero = constant_frame(16, 16, 3, 0);
    const Frame sixteen = constant_frame(16, 16, 3, 16);
    const Frame bright = constant_frame(16, 16, 3, 255);

    CHECK(std::isinf(psnr(zero, zero)));
    // the anchor truncation pre-scales the sentinel to exactly 1
    MetricSpec spec;
    spec.direction = Direction::HIB;
    spec.anchor_low = 0;
    spec.anchor_high = 50;
    CHECK(prescale(psnr(zero, zero), spec) == 1.0);

    CHECK(psnr(zero, sixteen) == doctest::Approx(10.0 * std::log10(65025.0 / 256.0)).epsilon(1e-12));
    CHECK(psnr(zero, sixteen) == doctest::Approx(24.05).epsilon(0.001));
    CHECK(psnr(zero, bright) == 0.0);

    CHECK(psnr(zero, sixteen) == psnr(sixteen, zero));
    CHECK_THROWS_AS(psnr(zero, constant_frame(8, 16, 3, 0)), std::invalid_argument);
}

TEST_CASE("psnr strictly decreases as mse grows") {
    Frame base = constant_frame(12, 12, 1, 100);
    double previous = std::numeric_limits<double>::infinity();
    for (int k = 1; k <= 6; ++k) {
        Frame perturbed = base;
        for (int i = 0; i < k * 12; ++i) {
            perturbed.data[static_cast<size_t>(i)] = static_cast<std::uint8_t>(100 + 10 + k);
        }
        const double value = psnr(base, perturbed);
        CHECK(value < previous);
        previous = value;
    }
}

TEST_CASE("ssim of identical frames is exactly 1") {
    const Frame checker = checker_frame(16, 13);
    CHECK(ssim(checker, checker) == 1.0);
    const Frame c3 = constant_frame(11, 11, 3, 77);
    CHECK(ssim(c3, c3) == 1.0);
}

TEST_CASE("ssim matches the direct windowed oracle; negatives on inverted frames") {
    const Frame checker = checker_frame(14, 12);
    const Frame inverted = negate(checker);
    const double expected =
        oracle::ssim_direct(plane_as_double(checker), plane_as_double(inverted), 14, 12);
    const double value = ssim(checker, inverted);
    CHECK(value == doctest::Approx(expected).epsilon(1e-9));
    CHECK(value >= -1.0);
    CHECK(value < 0.0);

    oracle::Rng rng(321);
    Frame noisy = checker_frame(15, 15);
    for (auto& v : noisy.data) v = static_cast<std::uint8_t>(rng.uniform_int(0, 255));
    Frame other = noisy;
    for (auto& v : other.data) v = static_cast<std::uint8_t>(rng.uniform_int(0, 255));
    CHECK(ssim(noisy, other) ==
          doctest::Approx(oracle::ssim_direct(plane_as_double(noisy), plane_as_double(other), 15, 15))
              .epsilon(1e-9));
}

TEST_CASE("ssim closed form for constant frames one gray level apart") {
    const double c = 100.0;
    const Frame a = constant_frame(12, 12, 1, 100);
    const Frame b = constant_frame(12, 12, 1, 101);
    constexpr double c1 = (0.01 * 255.0) * (0.01 * 255.0);
    const double expected = (2.0 * c * (c + 1.0) + c1) / (c * c + (c + 1.0) * (c + 1.0) + c1);
    CHECK(ssim(a, b) == doctest::Approx(expected).epsilon(1e-9));
    CHECK(ssim(a, b) == ssim(b, a));
}

TEST_CASE("ssim rejects frames smaller than the window") {
    CHECK_THROWS_AS(ssim(constant_frame(10, 16, 1, 0), constant_frame(10, 16, 1, 0)),
                    std::invalid_argument);
}
