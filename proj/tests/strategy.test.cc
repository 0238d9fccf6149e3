#include "pchsh/strategy.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "pchsh/game.h"
#include "test_util.h"

using namespace pchsh;

TEST(IdealStrategy, two_qubit_state) {
    Strategy s = ideal_strategy(2);
    StateVector expected(4);
    expected << 0.5, 0.5, 0.5, -0.5;
    EXPECT_LT((s.state - expected).norm(), 1e-15);
    EXPECT_LT(max_abs_diff(s.alice(BitString::from_string("0"), 0), pauli_x()), 1e-15);
    EXPECT_LT(max_abs_diff(s.alice(BitString::from_string("1"), 0), pauli_z()), 1e-15);
    EXPECT_LT(max_abs_diff(s.bob(BitString::from_string("0"), 0), (pauli_z() + pauli_x()) / std::sqrt(2.0)), 1e-15);
    EXPECT_LT(max_abs_diff(s.bob(BitString::from_string("1"), 0), (pauli_z() - pauli_x()) / std::sqrt(2.0)), 1e-15);
}

TEST(IdealStrategy, four_qubit_shape) {
    Strategy s = ideal_strategy(4);
    EXPECT_EQ(s.state.size(), 16);
    EXPECT_EQ(s.alice_obs.size(), 4u);
    for (const auto &family : s.alice_obs) {
        EXPECT_EQ(family.size(), 2u);
    }
}

TEST(IdealStrategy, matches_graph_state_formula) {
    for (std::size_t n : {2, 4, 6}) {
        Strategy s = ideal_strategy(n);
        std::size_t m = n / 2;
        for (std::uint64_t u = 0; u < (std::uint64_t{1} << n); ++u) {
            BitString b(n, u);
            double sign = b.first_half().dot(b.second_half()) % 2 ? -1.0 : 1.0;
            ASSERT_NEAR(s.state(u).real(), sign * std::ldexp(1.0, -static_cast<int>(m)), 1e-15);
            ASSERT_EQ(s.state(u).imag(), 0.0);
        }
    }
}

TEST(IdealStrategy, rejects_odd_or_zero) {
    EXPECT_THROW(ideal_strategy(3), std::invalid_argument);
    EXPECT_THROW(ideal_strategy(0), std::invalid_argument);
}

TEST(Validate, ideal_passes) {
    ValidationReport r = validate(ideal_strategy(4));
    EXPECT_TRUE(r.passed());
    EXPECT_LE(r.hermiticity, 1e-10);
    EXPECT_LE(r.unitarity, 1e-10);
    EXPECT_LE(r.commutation, 1e-10);
    EXPECT_LE(r.normalization, 1e-10);
}

TEST(Validate, non_unitary_observable) {
    Strategy s = ideal_strategy(2);
    s.alice_obs[0][0] = 0.5 * pauli_x();
    ValidationReport r = validate(s);
    EXPECT_DOUBLE_EQ(r.unitarity, 0.75);
    EXPECT_FALSE(r.passed());
    EXPECT_THROW(require_valid(s), std::invalid_argument);
}

TEST(Validate, anticommuting_pair_in_one_question) {
    Strategy s = ideal_strategy(4);
    s.alice_obs[0][0] = tensor(pauli_x(), identity(2));
    s.alice_obs[0][1] = tensor(pauli_z(), identity(2));
    ValidationReport r = validate(s);
    EXPECT_DOUBLE_EQ(r.commutation, 2.0);
    EXPECT_FALSE(r.passed());
}

TEST(Validate, structural_problems) {
    Strategy s = ideal_strategy(2);
    s.bob_obs.pop_back();
    EXPECT_FALSE(validate(s).passed());
    Strategy t = ideal_strategy(2);
    t.state *= 2.0;
    EXPECT_FALSE(validate(t).passed());
}

TEST(Validate, random_strategies_pass) {
    std::mt19937 rng(17);
    for (int trial = 0; trial < 30; ++trial) {
        ASSERT_TRUE(validate(fixtures::random_strategy(trial % 2 ? 4 : 2, rng)).passed());
    }
}

TEST(JointProjector, ideal_example) {
    Strategy s = ideal_strategy(2);
    ComplexMatrix p = joint_projector(s, Party::alice, BitString::zeros(1), BitString::zeros(1));
    EXPECT_LT(max_abs_diff(p, (identity(2) + pauli_x()) / 2.0), 1e-15);
}

TEST(JointProjector, complete_and_idempotent) {
    std::mt19937 rng(19);
    Strategy s = fixtures::random_strategy(4, rng);
    for (Party party : {Party::alice, Party::bob}) {
        for (std::uint64_t q = 0; q < 4; ++q) {
            BitString question(2, q);
            Eigen::Index d = party == Party::alice ? s.shape.dim_a : s.shape.dim_b;
            ComplexMatrix sum = ComplexMatrix::Zero(d, d);
            for (std::uint64_t a = 0; a < 4; ++a) {
                ComplexMatrix p = joint_projector(s, party, question, BitString(2, a));
                ASSERT_LT(max_abs_diff(p * p, p), 1e-10);
                ASSERT_LT(hermiticity_residual(p), 1e-10);
                sum += p;
            }
            ASSERT_LT(max_abs_diff(sum, identity(d)), 1e-10);
        }
    }
}

TEST(JointProjector, rejects_noncommuting_family) {
    Strategy s = ideal_strategy(4);
    s.alice_obs[0][0] = tensor(pauli_x(), identity(2));
    s.alice_obs[0][1] = tensor(pauli_z(), identity(2));
    EXPECT_THROW(joint_projector(s, Party::alice, BitString::zeros(2), BitString::zeros(2)), std::invalid_argument);
}

TEST(SampleAnswers, deterministic_strategy) {
    Strategy s = fixtures::all_zero_strategy(4);
    for (auto &family : s.bob_obs) {
        family[1] = -identity(2);
    }
    std::mt19937_64 rng(1);
    for (int i = 0; i < 200; ++i) {
        AnswerPair a = sample_answers(s, BitString(2, i % 4), BitString(2, (i / 4) % 4), rng);
        ASSERT_EQ(a.alice.to_string(), "00");
        ASSERT_EQ(a.bob.to_string(), "01");
    }
}

TEST(SampleAnswers, ideal_marginals_uniform) {
    Strategy s = ideal_strategy(4);
    std::mt19937_64 rng(2024);
    AnswerSampler sampler(s);
    const int samples = 100000;
    std::array<int, 2> alice_ones{}, bob_ones{};
    for (int i = 0; i < samples; ++i) {
        AnswerPair a = sampler.sample(BitString(2, i % 4), BitString(2, (i / 4) % 4), rng);
        for (std::size_t k = 0; k < 2; ++k) {
            alice_ones[k] += a.alice[k];
            bob_ones[k] += a.bob[k];
        }
    }
    double sigma = std::sqrt(samples * 0.25);
    for (std::size_t k = 0; k < 2; ++k) {
        EXPECT_LT(std::abs(alice_ones[k] - samples / 2.0), 5 * sigma);
        EXPECT_LT(std::abs(bob_ones[k] - samples / 2.0), 5 * sigma);
    }
}

TEST(SampleAnswers, matches_born_oracle) {
    std::mt19937 gen(23);
    Strategy s = fixtures::random_strategy(4, gen, 3);
    std::mt19937_64 rng(29);
    AnswerSampler sampler(s);
    BitString qa = BitString::from_string("10");
    BitString qb = BitString::from_string("11");
    auto p = fixtures::oracle_born(s, qa.value(), qb.value());
    const int samples = 40000;
    std::vector<std::vector<int>> counts(4, std::vector<int>(4));
    for (int i = 0; i < samples; ++i) {
        AnswerPair a = sampler.sample(qa, qb, rng);
        ++counts[a.alice.value()][a.bob.value()];
    }
    for (int x = 0; x < 4; ++x) {
        for (int y = 0; y < 4; ++y) {
            double px = std::clamp(p[x][y], 0.0, 1.0);
            double mean = samples * px;
            double sigma = std::sqrt(samples * px * (1 - px)) + 1.0;
            EXPECT_LT(std::abs(counts[x][y] - mean), 5 * sigma) << x << "," << y;
        }
    }
}

TEST(NoisyStrategy, none_is_ideal) {
    Strategy s = noisy_strategy(4, {NoiseModel::none, 0.0});
    EXPECT_NEAR(exact_value(s).value, kTsirelsonBound, 1e-12);
    EXPECT_THROW(noisy_strategy(2, {NoiseModel::none, 0.1}), std::invalid_argument);
}

TEST(NoisyStrategy, bob_rotation_fixture) {
    // 2 sqrt2 cos(0.1), from the single-pair CHSH expectation.
    const double oracle = 2.8142967703078097;
    Strategy s = noisy_strategy(2, {NoiseModel::bob_rotation, 0.1});
    EXPECT_TRUE(validate(s).passed());
    double v = exact_value(s).value;
    EXPECT_NEAR(v, oracle, 1e-12);
    EXPECT_NEAR(fixtures::oracle_value(s), oracle, 1e-12);
    EXPECT_LT(v, kTsirelsonBound);
    EXPECT_GT(v, 2.7);
}

TEST(NoisyStrategy, bob_rotation_even_in_angle) {
    for (double eta : {0.03, 0.2, 0.7}) {
        double plus = exact_value(noisy_strategy(4, {NoiseModel::bob_rotation, eta})).value;
        double minus = exact_value(noisy_strategy(4, {NoiseModel::bob_rotation, -eta})).value;
        EXPECT_NEAR(plus, minus, 1e-12);
        EXPECT_NEAR(plus, kTsirelsonBound * std::cos(eta), 1e-12);
    }
}

TEST(NoisyStrategy, partial_entanglement) {
    for (double theta : {0.2, 0.5, std::numbers::pi / 4}) {
        Strategy s = noisy_strategy(4, {NoiseModel::partial_entanglement, theta});
        EXPECT_TRUE(validate(s).passed());
        EXPECT_NEAR(exact_value(s).value, std::sqrt(2.0) * (1 + std::sin(2 * theta)), 1e-12);
    }
    EXPECT_THROW(noisy_strategy(2, {NoiseModel::partial_entanglement, 0.0}), std::invalid_argument);
    EXPECT_THROW(noisy_strategy(2, {NoiseModel::partial_entanglement, 1.0}), std::invalid_argument);
}

TEST(NoiseModelNames, round_trip) {
    for (NoiseModel m : {NoiseModel::none, NoiseModel::bob_rotation, NoiseModel::partial_entanglement}) {
        EXPECT_EQ(parse_noise_model(to_string(m)), m);
    }
    EXPECT_EQ(parse_noise_model("bob-rotation"), NoiseModel::bob_rotation);
    EXPECT_THROW(parse_noise_model("depolarizing"), std::invalid_argument);
}
