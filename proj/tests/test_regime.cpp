#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "rcurve/errors.hpp"
#include "rcurve/regime.hpp"

using namespace rcurve;

namespace {

Matrix two_state() {
    Matrix q(2, 2);
    q << -1, 1, 2, -2;
    return q;
}

} // namespace

TEST_CASE("generator validation") {
    CHECK_NOTHROW(validate_generator(two_state()));
    CHECK_NOTHROW(validate_generator(Matrix::Zero(3, 3)));

    Matrix bad = two_state();
    bad(0, 1) = 0.5; // row 1 sums to -0.5
    CHECK_THROWS_WITH_AS(validate_generator(bad), doctest::Contains("row 1"), validation_error);

    Matrix neg = two_state();
    neg(0, 1) = -1.0;
    neg(0, 0) = 1.0;
    CHECK_THROWS_AS(validate_generator(neg), validation_error);

    CHECK_THROWS_AS(validate_generator(Matrix::Zero(2, 3)), validation_error);
}

TEST_CASE("transition probabilities") {
    const auto Q = validate_generator(two_state());
    CHECK((transition_probabilities(Q, 0.0) - Matrix::Identity(2, 2)).norm() < 1e-14);

    const auto Z = validate_generator(Matrix::Zero(2, 2));
    CHECK((transition_probabilities(Z, 3.7) - Matrix::Identity(2, 2)).norm() < 1e-14);

    const Matrix p = transition_probabilities(Q, 1.0);
    const double em3 = std::exp(-3.0);
    CHECK(p(0, 0) == doctest::Approx(2.0 / 3.0 + em3 / 3.0).epsilon(1e-12));
    CHECK(p(1, 1) == doctest::Approx(1.0 / 3.0 + 2.0 * em3 / 3.0).epsilon(1e-12));
    for (int i = 0; i < 2; ++i) CHECK(std::abs(p.row(i).sum() - 1.0) < 1e-10);

    CHECK_THROWS_AS(transition_probabilities(Q, -0.1), validation_error);
}

TEST_CASE("absorbing generator produces constant paths") {
    const auto Z = validate_generator(Matrix::Zero(2, 2));
    RngStream rng(5);
    const auto path = sample_regime_path(Z, 1, 10.0, rng);
    CHECK(path.jump_times.empty());
    CHECK(path.states == std::vector<int>{1});
    CHECK(path.state_at(0.0) == 1);
    CHECK(path.state_at(9.99) == 1);
}

TEST_CASE("holding time mean in state 0") {
    // only the first holding interval per path is used: intervals completed
    // inside a fixed window are length-biased, the first one is not
    const auto Q = validate_generator(two_state());
    RngStream rng(123);
    const int n = 100000;
    double sum = 0.0, sumsq = 0.0;
    int count = 0;
    while (count < n) {
        const auto path = sample_regime_path(Q, 0, 40.0, rng);
        if (path.jump_times.empty()) continue; // censoring probability e^{-40}
        const double hold = path.jump_times.front();
        sum += hold;
        sumsq += hold * hold;
        ++count;
    }
    const double mean = sum / n;
    const double se = std::sqrt((sumsq / n - mean * mean) / (n - 1));
    CHECK(std::abs(mean - 1.0) <= 3.0 * se); // Exponential(1) holding law
}

TEST_CASE("long-horizon occupation matches the stationary law") {
    const auto Q = validate_generator(two_state());
    RngStream rng(321);
    const int n = 10000;
    const double horizon = 50.0;
    double sum = 0.0, sumsq = 0.0;
    for (int k = 0; k < n; ++k) {
        const auto path = sample_regime_path(Q, 0, horizon, rng);
        double occ = 0.0, prev = 0.0;
        int state = path.states[0];
        for (std::size_t j = 0; j < path.jump_times.size(); ++j) {
            if (state == 0) occ += path.jump_times[j] - prev;
            prev = path.jump_times[j];
            state = path.states[j + 1];
        }
        if (state == 0) occ += horizon - prev;
        const double frac = occ / horizon;
        sum += frac;
        sumsq += frac * frac;
    }
    const double mean = sum / n;
    const double se = std::sqrt((sumsq / n - mean * mean) / (n - 1));
    // exact window mean including the start-in-0 transient:
    // E[frac] = 2/3 + (1 - e^{-3T}) / (9T) with spectral gap 3
    const double exact = 2.0 / 3.0 + (1.0 - std::exp(-3.0 * horizon)) / (9.0 * horizon);
    CHECK(std::abs(mean - exact) <= 3.0 * se);
}

TEST_CASE("one-step distribution matches the transition kernel") {
    const auto Q = validate_generator(two_state());
    const int n = 100000;
    for (double t : {0.5, 1.0, 2.0}) {
        RngStream rng(777);
        int in_state0 = 0;
        for (int k = 0; k < n; ++k) {
            const auto path = sample_regime_path(Q, 0, t, rng);
            if (path.state_at(t) == 0) ++in_state0;
        }
        const double p = transition_probabilities(Q, t)(0, 0);
        const double se = std::sqrt(p * (1.0 - p) / n);
        CHECK(std::abs(static_cast<double>(in_state0) / n - p) <= 4.0 * se);
    }
}

TEST_CASE("path structure invariants and determinism") {
    const auto Q = validate_generator(two_state());
    RngStream a(42), b(42);
    const auto p1 = sample_regime_path(Q, 0, 25.0, a);
    const auto p2 = sample_regime_path(Q, 0, 25.0, b);
    CHECK(p1.jump_times == p2.jump_times);
    CHECK(p1.states == p2.states);
    REQUIRE(p1.states.size() == p1.jump_times.size() + 1);
    for (std::size_t k = 0; k + 1 < p1.jump_times.size(); ++k) {
        CHECK(p1.jump_times[k] < p1.jump_times[k + 1]);
    }
    for (double t : p1.jump_times) CHECK(t <= 25.0);
    for (std::size_t k = 0; k + 1 < p1.states.size(); ++k) {
        CHECK(p1.states[k] != p1.states[k + 1]);
    }
}
