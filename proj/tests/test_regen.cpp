#include <doctest.h>

#include <cmath>

#include "dida/numerics.hpp"
#include "dida/regen.hpp"
#include "dida/rng.hpp"

using namespace dida;

TEST_CASE("scatter worked examples") {
    const std::vector<int> labels{0, 0, 1, 1};

    const auto a = scatter(std::vector<double>{0.7, 0.3}, labels);
    CHECK(a == std::vector<double>{0.7, 0.7, 0.3, 0.3});

    const auto onehot = scatter(std::vector<double>{0.0, 1.0}, labels);
    CHECK(onehot == std::vector<double>{0.0, 0.0, 1.0, 1.0});

    const auto uniform = scatter(std::vector<double>{0.5, 0.5}, labels);
    CHECK(uniform == std::vector<double>{0.5, 0.5, 0.5, 0.5});

    CHECK_THROWS_AS(scatter(std::vector<double>{1.0}, std::vector<int>{0, 1}), Error);
}

TEST_CASE("scale worked examples") {
    SUBCASE("hand evaluation") {
        const auto res = scale(std::vector<double>{0.25, 0.25, 0.25, 0.25},
                               std::vector<double>{0.7, 0.7, 0.3, 0.3});
        CHECK_FALSE(res.fallback);
        CHECK(res.q_hat[0] == doctest::Approx(0.35).epsilon(1e-12));
        CHECK(res.q_hat[1] == doctest::Approx(0.35).epsilon(1e-12));
        CHECK(res.q_hat[2] == doctest::Approx(0.15).epsilon(1e-12));
        CHECK(res.q_hat[3] == doctest::Approx(0.15).epsilon(1e-12));
    }

    SUBCASE("constant z_sc passes q through") {
        const std::vector<double> q{0.1, 0.2, 0.3, 0.4};
        const auto res = scale(q, std::vector<double>{0.5, 0.5, 0.5, 0.5});
        CHECK_FALSE(res.fallback);
        for (int k = 0; k < 4; ++k) {
            CHECK(res.q_hat[k] == doctest::Approx(q[k]).epsilon(1e-12));
        }
    }

    SUBCASE("one-hot q stays one-hot") {
        const auto res = scale(std::vector<double>{0.0, 1.0, 0.0},
                               std::vector<double>{0.2, 0.5, 0.3});
        CHECK(res.q_hat == std::vector<double>{0.0, 1.0, 0.0});
    }

    SUBCASE("disjoint supports trigger the fallback") {
        const std::vector<double> q{1.0, 0.0};
        const auto res = scale(q, std::vector<double>{0.0, 1.0});
        CHECK(res.fallback);
        CHECK(res.q_hat == q);
    }
}

TEST_CASE("gather worked examples") {
    const std::vector<int> labels{0, 0, 1, 1};

    const auto a = gather(std::vector<double>{0.1, 0.2, 0.3, 0.4}, labels, 2);
    CHECK(a[0] == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(a[1] == doctest::Approx(0.7).epsilon(1e-12));

    const auto uniform = gather(std::vector<double>{0.25, 0.25, 0.25, 0.25}, labels, 2);
    CHECK(uniform[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(uniform[1] == doctest::Approx(0.5).epsilon(1e-12));

    const auto onehot = gather(std::vector<double>{0.6, 0.4, 0.0, 0.0}, labels, 2);
    CHECK(onehot[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(onehot[1] == doctest::Approx(0.0).epsilon(1e-12));

    // A class with no slots receives zero mass.
    const auto sparse = gather(std::vector<double>{0.5, 0.5}, std::vector<int>{0, 0}, 3);
    CHECK(sparse == std::vector<double>{1.0, 0.0, 0.0});
}

TEST_CASE("smooth worked examples") {
    const std::vector<double> z{0.7, 0.3}, q{0.3, 0.7};

    CHECK(smooth(z, q, 1.0) == z);
    CHECK(smooth(z, q, 0.0) == q);

    const auto mid = smooth(z, q, 0.9);
    CHECK(mid[0] == doctest::Approx(0.66).epsilon(1e-12));
    CHECK(mid[1] == doctest::Approx(0.34).epsilon(1e-12));
}

namespace {

std::vector<double> random_simplex(int n, Rng& rng) {
    std::vector<double> s(n);
    for (auto& v : s) v = rng.uniform(-2.0, 2.0);
    return softmax_temp(s, 1.0);
}

} // namespace

TEST_CASE("regeneration algebra on random triples") {
    Rng rng(17);
    for (int trial = 0; trial < 500; ++trial) {
        const int C = 2 + rng.uniform_int(7);
        const int K = C + rng.uniform_int(39 - C);
        std::vector<int> labels(K);
        for (int c = 0; c < C; ++c) labels[c] = c; // every class owns a slot
        for (int k = C; k < K; ++k) labels[k] = rng.uniform_int(C);

        const auto z = random_simplex(C, rng);
        const auto q = random_simplex(K, rng);

        // Scatter is an exact value copy.
        const auto z_sc = scatter(z, labels);
        for (int k = 0; k < K; ++k) CHECK(z_sc[k] == z[labels[k]]);

        // Gather conserves total mass.
        const auto q_ga = gather(q, labels, C);
        double total = 0.0;
        for (double v : q_ga) total += v;
        CHECK(std::abs(total - 1.0) < 1e-12);

        // Outputs live on their simplices.
        const auto scaled = scale(q, z_sc);
        CHECK(on_simplex(scaled.q_hat, 1e-9));
        const double phi = rng.uniform();
        const auto z_hat = smooth(z, q_ga, phi);
        CHECK(on_simplex(z_hat, 1e-9));

        // Convex bound per coordinate, exact.
        for (int c = 0; c < C; ++c) {
            CHECK(z_hat[c] >= std::min(z[c], q_ga[c]));
            CHECK(z_hat[c] <= std::max(z[c], q_ga[c]));
        }
    }
}

TEST_CASE("gather of scatter with balanced slots recovers z") {
    // n_c slots per class, q = normalize(scatter(z) * uniform): gathering
    // returns z when every class has the same number of slots.
    Rng rng(18);
    for (int trial = 0; trial < 50; ++trial) {
        const int C = 2 + rng.uniform_int(6);
        const int per = 1 + rng.uniform_int(4);
        std::vector<int> labels;
        for (int c = 0; c < C; ++c) {
            for (int i = 0; i < per; ++i) labels.push_back(c);
        }
        const auto z = random_simplex(C, rng);
        auto sc = scatter(z, labels);
        double total = 0.0;
        for (double v : sc) total += v;
        for (auto& v : sc) v /= total; // normalize(scatter(z) * uniform mass)
        const auto back = gather(sc, labels, C);
        for (int c = 0; c < C; ++c) {
            CHECK(back[c] == doctest::Approx(z[c]).epsilon(1e-12));
        }
    }
}

TEST_CASE("regenerate composes the single ops on snapshots") {
    Rng rng(19);
    const int C = 3, K = 7, H = 2, W = 3;
    std::vector<int> labels{0, 1, 2, 0, 1, 0, 2};

    DenseGrid z_map(H, W, C), q_map(H, W, K);
    for (int i = 0; i < H * W; ++i) {
        const auto z = random_simplex(C, rng);
        const auto q = random_simplex(K, rng);
        std::copy(z.begin(), z.end(), z_map.data.begin() + static_cast<std::size_t>(i) * C);
        std::copy(q.begin(), q.end(), q_map.data.begin() + static_cast<std::size_t>(i) * K);
    }

    InteractionStrategy strategy; // z smoothing, q scaling
    strategy.phi = 0.85;
    const auto out = regenerate(z_map, q_map, labels, strategy);

    for (int y = 0; y < H; ++y) {
        for (int x = 0; x < W; ++x) {
            const std::vector<double> z(z_map.pixel(y, x).begin(), z_map.pixel(y, x).end());
            const std::vector<double> q(q_map.pixel(y, x).begin(), q_map.pixel(y, x).end());
            const auto z_sc = scatter(z, labels);
            const auto q_ga = gather(q, labels, C);
            const auto q_hat = scale(q, z_sc);
            const auto z_hat = smooth(z, q_ga, strategy.phi);
            for (int k = 0; k < K; ++k) {
                CHECK(out.q_hat.pixel(y, x)[k] == doctest::Approx(q_hat.q_hat[k]).epsilon(1e-15));
            }
            for (int c = 0; c < C; ++c) {
                CHECK(out.z_hat.pixel(y, x)[c] == doctest::Approx(z_hat[c]).epsilon(1e-15));
            }
        }
    }
}

TEST_CASE("phi = 1 reduces z_hat to z exactly") {
    Rng rng(20);
    const int C = 4, K = 9;
    std::vector<int> labels(K);
    for (int k = 0; k < K; ++k) labels[k] = k % C;
    DenseGrid z_map(2, 2, C), q_map(2, 2, K);
    for (int i = 0; i < 4; ++i) {
        const auto z = random_simplex(C, rng);
        const auto q = random_simplex(K, rng);
        std::copy(z.begin(), z.end(), z_map.data.begin() + static_cast<std::size_t>(i) * C);
        std::copy(q.begin(), q.end(), q_map.data.begin() + static_cast<std::size_t>(i) * K);
    }
    InteractionStrategy strategy;
    strategy.phi = 1.0;
    const auto out = regenerate(z_map, q_map, labels, strategy);
    CHECK(out.z_hat.data == z_map.data); // bitwise
}

TEST_CASE("concentrated mass stays concentrated") {
    // z one-hot at class 1, q concentrated on class-1 slots: z_hat stays
    // one-hot and q_hat stays supported on class-1 slots.
    const int C = 3, K = 6;
    const std::vector<int> labels{0, 1, 1, 2, 0, 1};
    DenseGrid z_map(1, 1, C), q_map(1, 1, K);
    z_map.data = {0.0, 1.0, 0.0};
    q_map.data = {0.0, 0.5, 0.3, 0.0, 0.0, 0.2};

    InteractionStrategy strategy;
    strategy.phi = 0.9;
    const auto out = regenerate(z_map, q_map, labels, strategy);
    CHECK(out.z_hat.data[0] == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(out.z_hat.data[1] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(out.z_hat.data[2] == doctest::Approx(0.0).epsilon(1e-15));
    for (int k = 0; k < K; ++k) {
        if (labels[k] == 1) continue;
        CHECK(out.q_hat.data[k] == doctest::Approx(0.0).epsilon(1e-15));
    }
    CHECK(on_simplex(out.q_hat.pixel(0, 0), 1e-9));
}

TEST_CASE("all four interaction cells produce simplex outputs") {
    Rng rng(21);
    const int C = 3, K = 8;
    std::vector<int> labels(K);
    for (int k = 0; k < K; ++k) labels[k] = k % C;
    DenseGrid z_map(2, 2, C), q_map(2, 2, K);
    for (int i = 0; i < 4; ++i) {
        const auto z = random_simplex(C, rng);
        const auto q = random_simplex(K, rng);
        std::copy(z.begin(), z.end(), z_map.data.begin() + static_cast<std::size_t>(i) * C);
        std::copy(q.begin(), q.end(), q_map.data.begin() + static_cast<std::size_t>(i) * K);
    }
    for (RegenMode zm : {RegenMode::Smoothing, RegenMode::Scaling}) {
        for (RegenMode qm : {RegenMode::Smoothing, RegenMode::Scaling}) {
            InteractionStrategy strategy{zm, qm, 0.7};
            const auto out = regenerate(z_map, q_map, labels, strategy);
            for (int y = 0; y < 2; ++y) {
                for (int x = 0; x < 2; ++x) {
                    CHECK(on_simplex(out.z_hat.pixel(y, x), 1e-9));
                    CHECK(on_simplex(out.q_hat.pixel(y, x), 1e-9));
                }
            }
        }
    }
}

TEST_CASE("regenerate rejects mismatched shapes") {
    DenseGrid z_map(2, 2, 3), q_map(2, 3, 5);
    const std::vector<int> labels{0, 1, 2, 0, 1};
    CHECK_THROWS_AS(regenerate(z_map, q_map, labels, InteractionStrategy{}), Error);
}
