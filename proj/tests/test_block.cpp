#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "sgs/block.hpp"

using namespace sgs;

namespace {

double max_rel_err(const std::vector<double>& a, const std::vector<double>& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double den = std::max({std::abs(a[i]), std::abs(b[i]), 1e-30});
        worst = std::max(worst, std::abs(a[i] - b[i]) / den);
    }
    return worst;
}

} // namespace

TEST_CASE("pointwise_transform") {
    Tensor3 x = random_tensor(2, 3, 4, 1);

    SUBCASE("identity") {
        Matrix id(2, 2);
        id.at(0, 0) = 1.0;
        id.at(1, 1) = 1.0;
        Tensor3 out = pointwise_transform(x, id);
        CHECK(out.values == x.values);
    }

    SUBCASE("zero matrix annihilates") {
        Matrix z(3, 2);
        Tensor3 out = pointwise_transform(x, z);
        CHECK(out.C == 3);
        for (double v : out.values) CHECK(v == 0.0);
    }

    SUBCASE("row-sum matrix") {
        Tensor3 t(2, 1, 1);
        t.at(0, 0, 0) = 2.0;
        t.at(1, 0, 0) = 3.0;
        Matrix sum(1, 2);
        sum.at(0, 0) = 1.0;
        sum.at(0, 1) = 1.0;
        Tensor3 out = pointwise_transform(t, sum);
        CHECK(out.at(0, 0, 0) == 5.0);
    }

    SUBCASE("channel mismatch throws") {
        Matrix bad(1, 3);
        CHECK_THROWS_AS(pointwise_transform(x, bad), std::invalid_argument);
    }
}

TEST_CASE("semi_global_block") {
    SUBCASE("zero psi reduces to pure residual") {
        Tensor3 input = random_tensor(3, 4, 4, 2);
        BlockParams p = random_block_params(3, 1, 3);
        p.psi_matrix = Matrix(3, 3);
        Tensor3 out = semi_global_block(input, p);
        CHECK(out.values == input.values);
    }

    SUBCASE("1x1 spatial map with identity psi gives 3I") {
        Tensor3 input = random_tensor(2, 1, 1, 4);
        BlockParams p = identity_block_params(2);
        Tensor3 out = semi_global_block(input, p);
        for (std::size_t i = 0; i < input.size(); ++i)
            CHECK(out.values[i] == doctest::Approx(3.0 * input.values[i]).epsilon(1e-15));
    }

    SUBCASE("matches composition of oracle operations") {
        Tensor3 input = random_tensor(4, 6, 6, 5);
        BlockParams p = random_block_params(4, 2, 5);
        Tensor3 out = semi_global_block(input, p);

        Tensor3 guide = pointwise_transform(input, p.lambda_matrix);
        Tensor3 values = pointwise_transform(input, p.psi_matrix);
        Tensor3 expected = crisscross_oracle(guide, values, p.scale);
        for (std::size_t i = 0; i < expected.size(); ++i)
            expected.values[i] += input.values[i];
        CHECK(max_rel_err(out.values, expected.values) <= 1e-10);
    }

    SUBCASE("normalized mode matches the oracle") {
        Tensor3 input = random_tensor(4, 5, 3, 6);
        BlockParams p = random_block_params(4, 1, 7);
        p.normalized = true;
        Tensor3 out = semi_global_block(input, p);

        Tensor3 guide = pointwise_transform(input, p.lambda_matrix);
        Tensor3 values = pointwise_transform(input, p.psi_matrix);
        Tensor3 expected = normalized_aggregate_oracle(guide, values, p.scale);
        for (std::size_t i = 0; i < expected.size(); ++i)
            expected.values[i] += input.values[i];
        CHECK(max_rel_err(out.values, expected.values) <= 1e-10);
    }
}

TEST_CASE("hierarchical_apply") {
    Tensor3 input = random_tensor(2, 4, 5, 8);
    BlockParams p = random_block_params(2, 1, 9);

    SUBCASE("one level equals the block") {
        Tensor3 a = hierarchical_apply(input, {1, true}, {p});
        Tensor3 b = semi_global_block(input, p);
        CHECK(a.values == b.values);
    }

    SUBCASE("two shared levels compose") {
        Tensor3 a = hierarchical_apply(input, {2, true}, {p});
        Tensor3 b = semi_global_block(semi_global_block(input, p), p);
        CHECK(a.values == b.values);
    }

    SUBCASE("zero psi composes to identity") {
        BlockParams zero = p;
        zero.psi_matrix = Matrix(2, 2);
        Tensor3 out = hierarchical_apply(input, {2, true}, {zero});
        CHECK(out.values == input.values);
    }

    SUBCASE("parameter count mismatch throws") {
        CHECK_THROWS_AS(hierarchical_apply(input, {2, false}, {p}), std::invalid_argument);
        CHECK_THROWS_AS(hierarchical_apply(input, {1, true}, {p, p}), std::invalid_argument);
    }
}

TEST_CASE("attention_slice") {
    SUBCASE("constant input gives all ones") {
        Tensor3 input = make_tensor(2, 3, 4, 0.5);
        BlockParams p = random_block_params(2, 1, 10);
        AttentionSlice s = attention_slice(input, p, {1, 1});
        REQUIRE(s.weights.size() == 6);
        for (double w : s.weights) CHECK(w == 1.0);
    }

    SUBCASE("larger alpha weakly increases off-center weights") {
        Tensor3 input = random_tensor(2, 1, 6, 11);
        BlockParams p = random_block_params(2, 1, 12);
        p.scale = {0.5, 0.5};
        AttentionSlice tight = attention_slice(input, p, {2, 0});
        p.scale = {5.0, 5.0};
        AttentionSlice loose = attention_slice(input, p, {2, 0});
        for (std::size_t i = 0; i < tight.weights.size(); ++i)
            CHECK(loose.weights[i] >= tight.weights[i]);
    }

    SUBCASE("matches the oracle on the reduced guide") {
        Tensor3 input = random_tensor(2, 5, 5, 13);
        BlockParams p = random_block_params(2, 1, 14);
        AttentionSlice got = attention_slice(input, p, {2, 2});
        Tensor3 guide = pointwise_transform(input, p.lambda_matrix);
        AttentionSlice expected = attention_slice_oracle(guide, {2, 2}, p.scale);
        REQUIRE(got.weights.size() == expected.weights.size());
        for (std::size_t i = 0; i < got.weights.size(); ++i)
            CHECK(got.weights[i] == expected.weights[i]);
    }
}

TEST_CASE("receptive field") {
    SUBCASE("one level: support is exactly the cross") {
        Tensor3 input = random_tensor(2, 5, 6, 15);
        BlockParams p = random_block_params(2, 1, 16);
        Position u{3, 2};
        Matrix map = effective_attention(input, {1, true}, {p}, u, 1e-4);
        for (int y = 0; y < 5; ++y) {
            for (int x = 0; x < 6; ++x) {
                bool on_cross = (x == u.x) || (y == u.y);
                if (on_cross)
                    CHECK(map.at(y, x) > 0.0);
                else
                    CHECK(map.at(y, x) == 0.0);
            }
        }
    }

    SUBCASE("two levels: full-image support") {
        Tensor3 input = random_tensor(2, 5, 5, 17);
        BlockParams p = random_block_params(2, 1, 18);
        Matrix map = effective_attention(input, {2, true}, {p}, {1, 3}, 1e-4);
        for (double v : map.v) CHECK(v > 0.0);
    }

    SUBCASE("zero psi leaves only the center indicator") {
        Tensor3 input = random_tensor(2, 4, 4, 19);
        BlockParams p = random_block_params(2, 1, 20);
        p.psi_matrix = Matrix(2, 2);
        Position u{2, 1};
        Matrix map = effective_attention(input, {1, true}, {p}, u, 1e-4);
        for (int y = 0; y < 4; ++y)
            for (int x = 0; x < 4; ++x) {
                if (x == u.x && y == u.y)
                    CHECK(map.at(y, x) == doctest::Approx(1.0).epsilon(1e-12));
                else
                    CHECK(map.at(y, x) == 0.0);
            }
    }
}

TEST_CASE("default reduced channels is C/8 floored, at least 1") {
    CHECK(default_reduced_channels(1) == 1);
    CHECK(default_reduced_channels(8) == 1);
    CHECK(default_reduced_channels(16) == 2);
    CHECK(default_reduced_channels(15) == 1);
    CHECK(default_reduced_channels(64) == 8);
}
