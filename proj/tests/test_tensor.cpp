#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "skymot/tensor.hpp"
#include "support/oracles.hpp"

using namespace skymot;

TEST_CASE("conv2d identity kernel returns the input") {
    Rng rng(1);
    const FeatureMap in = oracle::random_map(3, 5, 7, rng);
    const FeatureMap out = conv2d(in, ConvParams::identity(3));
    REQUIRE(out.same_shape(in));
    for (std::size_t i = 0; i < in.values.size(); ++i) CHECK(out.values[i] == in.values[i]);
}

TEST_CASE("conv2d zero weights yield the bias per channel") {
    Rng rng(2);
    const FeatureMap in = oracle::random_map(2, 4, 4, rng);
    ConvParams p(3, 2, 3, 3);
    p.bias = {0.5f, -1.0f, 2.0f};
    const FeatureMap out = conv2d(in, p);
    for (int o = 0; o < 3; ++o)
        for (int y = 0; y < 4; ++y)
            for (int x = 0; x < 4; ++x) CHECK(out.at(o, y, x) == p.bias[o]);
}

TEST_CASE("conv2d 3x3 ones over a 2x2 input sums the in-bounds window") {
    FeatureMap in(1, 2, 2);
    in.at(0, 0, 0) = 1;
    in.at(0, 0, 1) = 2;
    in.at(0, 1, 0) = 3;
    in.at(0, 1, 1) = 4;
    ConvParams p(1, 1, 3, 3);
    std::fill(p.weights.begin(), p.weights.end(), 1.0f);
    const FeatureMap out = conv2d(in, p);
    for (int y = 0; y < 2; ++y)
        for (int x = 0; x < 2; ++x) CHECK(out.at(0, y, x) == doctest::Approx(10.0f));
}

TEST_CASE("conv2d rejects channel mismatch and even kernels") {
    const FeatureMap in(2, 3, 3);
    CHECK_THROWS_AS(conv2d(in, ConvParams(1, 3, 3, 3)), DimensionError);
    CHECK_THROWS_AS(conv2d(in, ConvParams(1, 2, 2, 2)), ConfigError);
}

TEST_CASE("conv2d matches the loop oracle on random instances") {
    Rng rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        const FeatureMap in = oracle::random_map(3, 6, 5, rng);
        ConvParams p(4, 3, 3, 3);
        for (float& w : p.weights) w = static_cast<float>(rng.normal() * 0.3);
        for (float& b : p.bias) b = static_cast<float>(rng.normal());
        const FeatureMap got = conv2d(in, p);
        const oracle::D3 want = oracle::conv2d(oracle::from_map(in), p);
        for (int o = 0; o < 4; ++o)
            for (int y = 0; y < 6; ++y)
                for (int x = 0; x < 5; ++x)
                    CHECK(oracle::close(got.at(o, y, x), want[o][y][x], 1e-6));
    }
}

TEST_CASE("conv2d is linear in the input when bias is zero") {
    Rng rng(4);
    for (int trial = 0; trial < 20; ++trial) {
        const FeatureMap in = oracle::random_map(2, 5, 5, rng);
        ConvParams p(3, 2, 3, 3);
        for (float& w : p.weights) w = static_cast<float>(rng.normal());
        const float alpha = static_cast<float>(rng.uniform(-3.0, 3.0));
        FeatureMap scaled = in;
        for (float& v : scaled.values) v *= alpha;
        const FeatureMap lhs = conv2d(scaled, p);
        FeatureMap rhs = conv2d(in, p);
        for (float& v : rhs.values) v *= alpha;
        for (std::size_t i = 0; i < lhs.values.size(); ++i)
            CHECK(std::abs(lhs.values[i] - rhs.values[i]) <= 1e-5 * (1.0 + std::abs(rhs.values[i])));
    }
}

TEST_CASE("global_avg_pool on constants and impulses") {
    FeatureMap c(3, 2, 2, 2.5f);
    for (float v : global_avg_pool(c)) CHECK(v == 2.5f);

    FeatureMap imp(2, 3, 4, 0.0f);
    imp.at(1, 2, 3) = 6.0f;
    const auto pooled = global_avg_pool(imp);
    CHECK(pooled[0] == 0.0f);
    CHECK(pooled[1] == doctest::Approx(0.5f));
}

TEST_CASE("global_avg_pool matches the summation oracle") {
    Rng rng(5);
    const FeatureMap m = oracle::random_map(4, 3, 5, rng);
    const auto got = global_avg_pool(m);
    const auto want = oracle::gap(oracle::from_map(m));
    for (int c = 0; c < 4; ++c) CHECK(oracle::close(got[c], want[c], 1e-6));
}

TEST_CASE("max_pool_3x3_same keeps constants and dilates impulses") {
    const FeatureMap c(2, 4, 4, 1.5f);
    const FeatureMap pc = max_pool_3x3_same(c);
    for (float v : pc.values) CHECK(v == 1.5f);

    FeatureMap imp(1, 5, 5, 0.0f);
    imp.at(0, 2, 2) = 3.0f;
    const FeatureMap pi = max_pool_3x3_same(imp);
    for (int y = 0; y < 5; ++y)
        for (int x = 0; x < 5; ++x) {
            const bool in_plateau = std::abs(y - 2) <= 1 && std::abs(x - 2) <= 1;
            CHECK(pi.at(0, y, x) == (in_plateau ? 3.0f : 0.0f));
        }
}

TEST_CASE("max_pool_3x3_same matches the window oracle exactly") {
    Rng rng(6);
    const FeatureMap m = oracle::random_map(2, 6, 7, rng);
    const FeatureMap got = max_pool_3x3_same(m);
    const oracle::D3 want = oracle::maxpool3(oracle::from_map(m));
    for (int c = 0; c < 2; ++c)
        for (int y = 0; y < 6; ++y)
            for (int x = 0; x < 7; ++x) CHECK(got.at(c, y, x) == static_cast<float>(want[c][y][x]));
}

TEST_CASE("cosine_similarity_map on parallel, antiparallel, orthogonal and degenerate keys") {
    FeatureMap keys(2, 1, 4, 0.0f);
    // parallel
    keys.at(0, 0, 0) = 2.0f;
    keys.at(1, 0, 0) = 4.0f;
    // antiparallel
    keys.at(0, 0, 1) = -1.0f;
    keys.at(1, 0, 1) = -2.0f;
    // orthogonal
    keys.at(0, 0, 2) = -2.0f;
    keys.at(1, 0, 2) = 1.0f;
    // zero column stays zero

    const std::vector<float> q = {1.0f, 2.0f};
    const FeatureMap sim = cosine_similarity_map(q, keys);
    CHECK(sim.at(0, 0, 0) == doctest::Approx(1.0));
    CHECK(sim.at(0, 0, 1) == doctest::Approx(-1.0));
    CHECK(sim.at(0, 0, 2) == doctest::Approx(0.0));
    CHECK(sim.at(0, 0, 3) == 0.0f);

    CHECK_THROWS_AS(cosine_similarity_map({1.0f}, keys), DimensionError);
}

TEST_CASE("cosine_similarity_map stays within [-1, 1]") {
    Rng rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        const FeatureMap keys = oracle::random_map(5, 3, 3, rng, 10.0);
        std::vector<float> q(5);
        for (float& v : q) v = static_cast<float>(rng.normal() * 10.0);
        const FeatureMap sim = cosine_similarity_map(q, keys);
        for (float v : sim.values) {
            CHECK(v >= -1.0f - 1e-6f);
            CHECK(v <= 1.0f + 1e-6f);
        }
    }
}

TEST_CASE("layer_norm handles constants, two-point vectors and zero gain") {
    const std::vector<float> gain(4, 1.0f), shift(4, 0.0f);
    const auto zeros = layer_norm({3, 3, 3, 3}, gain, shift, 1e-5f);
    for (float v : zeros) CHECK(v == doctest::Approx(0.0f));

    const auto two = layer_norm({1, -1}, {1, 1}, {0, 0}, 1e-12f);
    CHECK(two[0] == doctest::Approx(1.0f).epsilon(1e-4));
    CHECK(two[1] == doctest::Approx(-1.0f).epsilon(1e-4));

    const auto flat = layer_norm({5, -2, 7, 0}, {0, 0, 0, 0}, {2, 2, 2, 2}, 1e-5f);
    for (float v : flat) CHECK(v == 2.0f);

    CHECK_THROWS_AS(layer_norm({1, 2}, gain, shift, 1e-5f), DimensionError);
}

TEST_CASE("layer_norm output is standardized for non-degenerate inputs") {
    Rng rng(8);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<float> x(16), gain(16, 1.0f), shift(16, 0.0f);
        for (float& v : x) v = static_cast<float>(rng.normal() * 4.0 + 1.0);
        const auto out = layer_norm(x, gain, shift, 1e-5f);
        double mean = 0, var = 0;
        for (float v : out) mean += v;
        mean /= 16.0;
        for (float v : out) var += (v - mean) * (v - mean);
        var /= 16.0;
        CHECK(std::abs(mean) <= 1e-5);
        CHECK(std::abs(var - 1.0) <= 1e-3);
    }
}

TEST_CASE("pointwise maps: relu, sigmoid, batchnorm") {
    Rng rng(9);
    FeatureMap m = oracle::random_map(3, 4, 4, rng);
    for (float& v : m.values) v = std::abs(v);
    const FeatureMap r = relu(m);
    for (std::size_t i = 0; i < m.values.size(); ++i) CHECK(r.values[i] == m.values[i]);

    const FeatureMap z(2, 3, 3, 0.0f);
    for (float v : sigmoid_map(z).values) CHECK(v == 0.5f);

    const FeatureMap bnm = batchnorm_inference(m, BatchNormParams::identity(3));
    for (std::size_t i = 0; i < m.values.size(); ++i)
        CHECK(std::abs(bnm.values[i] - m.values[i]) <= 1e-4f * (1.0f + std::abs(m.values[i])));

    BatchNormParams bad = BatchNormParams::identity(2);
    CHECK_THROWS_AS(batchnorm_inference(m, bad), DimensionError);
}

TEST_CASE("matmul_rows identity, zero and random oracle") {
    Rng rng(10);
    Matrix b(4, 5);
    for (float& v : b.values) v = static_cast<float>(rng.normal());

    const Matrix ib = matmul_rows(Matrix::identity(4), b);
    for (std::size_t i = 0; i < b.values.size(); ++i) CHECK(ib.values[i] == b.values[i]);

    const Matrix zb = matmul_rows(Matrix(3, 4, 0.0f), b);
    for (float v : zb.values) CHECK(v == 0.0f);

    Matrix a(3, 4);
    for (float& v : a.values) v = static_cast<float>(rng.normal());
    const Matrix got = matmul_rows(a, b);
    std::vector<std::vector<double>> ad(3, std::vector<double>(4)), bd(4, std::vector<double>(5));
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 4; ++j) ad[i][j] = a.at(i, j);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 5; ++j) bd[i][j] = b.at(i, j);
    const auto want = oracle::matmul(ad, bd);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 5; ++j) CHECK(oracle::close(got.at(i, j), want[i][j], 1e-6));

    CHECK_THROWS_AS(matmul_rows(a, Matrix(3, 2)), DimensionError);
}

TEST_CASE("ops are pure: repeated application is bit-identical") {
    Rng rng(11);
    const FeatureMap in = oracle::random_map(3, 5, 5, rng);
    ConvParams p(3, 3, 3, 3);
    for (float& w : p.weights) w = static_cast<float>(rng.normal());
    const FeatureMap a = conv2d(in, p);
    const FeatureMap b = conv2d(in, p);
    CHECK(a.values == b.values);
    CHECK(max_pool_3x3_same(in).values == max_pool_3x3_same(in).values);
    CHECK(global_avg_pool(in) == global_avg_pool(in));
}
