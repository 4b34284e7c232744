#include <doctest.h>

#include <cmath>

#include "dida/discrimination.hpp"

using namespace dida;

namespace {

// Bank with prescribed unit rows, CBS layout over C classes.
InstanceBank make_bank(const std::vector<std::vector<double>>& rows, int C) {
    Rng rng(99);
    const int K = static_cast<int>(rows.size());
    const int D = static_cast<int>(rows[0].size());
    InstanceBank bank = init_bank(K, C, D, rng);
    for (int k = 0; k < K; ++k) {
        const auto unit = l2_normalize(rows[k]);
        for (int d = 0; d < D; ++d) {
            bank.raw[static_cast<std::size_t>(k) * D + d] = unit[d];
            bank.features[static_cast<std::size_t>(k) * D + d] = unit[d];
        }
    }
    return bank;
}

DenseGrid single_pixel(const std::vector<double>& e) {
    DenseGrid g(1, 1, static_cast<int>(e.size()));
    std::copy(e.begin(), e.end(), g.data.begin());
    return g;
}

} // namespace

TEST_CASE("instance_predict nearest-neighbour limit") {
    // Query equal to bank row 1, all rows orthogonal, tiny temperature.
    const auto bank = make_bank({{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}}, 2);
    const auto pred = instance_predict(single_pixel({0.0, 1.0, 0.0, 0.0}), bank, 1e-4);
    const auto q = pred.grid.pixel(0, 0);
    int arg = 0;
    for (int k = 1; k < 4; ++k) {
        if (q[k] > q[arg]) arg = k;
    }
    CHECK(arg == 1);
    CHECK(q[1] > 0.9999);
}

TEST_CASE("instance_predict identical rows give uniform") {
    const auto bank = make_bank({{1, 1, 0}, {1, 1, 0}, {1, 1, 0}}, 3);
    const auto pred = instance_predict(single_pixel({0.4, -0.3, 0.8}), bank, 0.5);
    for (double p : pred.grid.pixel(0, 0)) {
        CHECK(p == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    }
}

TEST_CASE("instance_predict closed form for two slots") {
    // Cosines (1, 0) at tp = 0.1: [e^10/(e^10+1), 1/(e^10+1)].
    const auto bank = make_bank({{1, 0}, {0, 1}}, 2);
    const auto pred = instance_predict(single_pixel({3.0, 0.0}), bank, 0.1);
    const auto q = pred.grid.pixel(0, 0);
    const double e10 = std::exp(10.0);
    CHECK(q[0] == doctest::Approx(e10 / (e10 + 1.0)).epsilon(1e-12));
    CHECK(q[1] == doctest::Approx(1.0 / (e10 + 1.0)).epsilon(1e-12));
}

TEST_CASE("instance_predict zero-norm fallback and scale invariance") {
    const auto bank = make_bank({{1, 0}, {0, 1}, {1, 1}}, 3);

    const auto fallback = instance_predict(single_pixel({0.0, 0.0}), bank, 0.1);
    for (double p : fallback.grid.pixel(0, 0)) {
        CHECK(p == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    }

    Rng rng(7);
    for (int trial = 0; trial < 40; ++trial) {
        std::vector<double> e{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
        if (l2_norm(e) < 1e-6) continue;
        std::vector<double> scaled{e[0] * 37.5, e[1] * 37.5};
        const auto a = instance_predict(single_pixel(e), bank, 0.2);
        const auto b = instance_predict(single_pixel(scaled), bank, 0.2);
        for (int k = 0; k < 3; ++k) {
            CHECK(a.grid.data[k] == doctest::Approx(b.grid.data[k]).epsilon(1e-12));
        }
    }
}

TEST_CASE("instance_predict rows on the simplex, uniform limit at huge tp") {
    Rng rng(8);
    const int K = 12, D = 5, C = 4;
    InstanceBank bank = init_bank(K, C, D, rng);
    DenseGrid features(3, 4, D);
    for (auto& v : features.data) v = rng.uniform(-2.0, 2.0);

    const auto pred = instance_predict(features, bank, 0.1);
    for (int y = 0; y < 3; ++y) {
        for (int x = 0; x < 4; ++x) {
            CHECK(on_simplex(pred.grid.pixel(y, x), 1e-9));
        }
    }

    const auto flat = instance_predict(features, bank, 1e6);
    for (double p : flat.grid.data) {
        CHECK(std::abs(p - 1.0 / K) < 1e-4);
    }
}

TEST_CASE("instance_loss worked examples") {
    const int K = 4;
    InstancePredictionMap onehot_k, pred_same, uniform, pred_eps;
    onehot_k.grid = DenseGrid(1, 1, K);
    onehot_k.grid.data = {0.0, 0.0, 1.0, 0.0};
    pred_same.grid = onehot_k.grid;
    CHECK(instance_loss(pred_same, onehot_k) == doctest::Approx(0.0).epsilon(1e-12));

    uniform.grid = DenseGrid(1, 1, K);
    std::fill(uniform.grid.data.begin(), uniform.grid.data.end(), 0.25);
    CHECK(instance_loss(uniform, uniform) == doctest::Approx(std::log(4.0)).epsilon(1e-12));

    const double eps = 1e-6;
    pred_eps.grid = DenseGrid(1, 1, K);
    pred_eps.grid.data = {(1.0 - eps) / 3, (1.0 - eps) / 3, eps, (1.0 - eps) / 3};
    CHECK(instance_loss(pred_eps, onehot_k) == doctest::Approx(-std::log(eps)).epsilon(1e-9));

    InstancePredictionMap wrong;
    wrong.grid = DenseGrid(1, 2, K);
    CHECK_THROWS_AS(instance_loss(wrong, onehot_k), Error);
}

TEST_CASE("instance_loss non-negative, zero iff matching one-hot") {
    Rng rng(9);
    for (int trial = 0; trial < 50; ++trial) {
        const int K = 2 + rng.uniform_int(8);
        InstancePredictionMap pred, pseudo;
        pred.grid = DenseGrid(2, 2, K);
        pseudo.grid = DenseGrid(2, 2, K);
        for (int i = 0; i < 4; ++i) {
            std::vector<double> s1(K), s2(K);
            for (auto& v : s1) v = rng.uniform(-3.0, 3.0);
            for (auto& v : s2) v = rng.uniform(-3.0, 3.0);
            const auto p1 = softmax_temp(s1, 1.0);
            const auto p2 = softmax_temp(s2, 1.0);
            std::copy(p1.begin(), p1.end(),
                      pred.grid.data.begin() + static_cast<std::size_t>(i) * K);
            std::copy(p2.begin(), p2.end(),
                      pseudo.grid.data.begin() + static_cast<std::size_t>(i) * K);
        }
        CHECK(instance_loss(pred, pseudo) >= 0.0);
        // Sum reduction is exactly pixel count times the mean.
        CHECK(instance_loss(pred, pseudo, true) ==
              doctest::Approx(4.0 * instance_loss(pred, pseudo)).epsilon(1e-12));
    }
}
