#pragma once

#include <cstddef>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pchsh/bitstring.h"
#include "pchsh/linalg.h"

namespace pchsh {

enum class Party { alice, bob };

/// Residual tolerance shared by strategy validation and extracted-operator checks.
inline constexpr double kValidationTol = 1e-8;
/// Largest n for which dense strategies are constructed.
inline constexpr std::size_t kMaxStrategyN = 24;

/// A bipartite quantum strategy for the parallel game on n tested qubits
/// (n/2 simultaneous subtests).
///
/// Observables are indexed first by question value (BitString::value() of the
/// party's n/2-bit question) and then by subtest. Observables of one question
/// must commute; they are the +/-1 observables of a single projective
/// measurement. Subtest k uses Alice's qubit k and Bob's qubit k, which is
/// global qubit k + n/2.
struct Strategy {
    std::size_t n = 0;
    BipartiteShape shape;
    StateVector state;
    std::vector<std::vector<ComplexMatrix>> alice_obs;
    std::vector<std::vector<ComplexMatrix>> bob_obs;

    std::size_t subtests() const { return n / 2; }
    std::size_t question_count() const { return std::size_t{1} << subtests(); }

    const ComplexMatrix &alice(const BitString &question, std::size_t k) const;
    const ComplexMatrix &bob(const BitString &question, std::size_t k) const;
    const ComplexMatrix &observable(Party party, const BitString &question, std::size_t k) const;
};

enum class NoiseModel { none, bob_rotation, partial_entanglement };

struct NoiseSpec {
    NoiseModel model = NoiseModel::none;
    /// Radians for bob_rotation; the angle theta in (0, pi/4] for partial_entanglement.
    double param = 0.0;
};

NoiseModel parse_noise_model(std::string_view name);
std::string to_string(NoiseModel model);

/// n/2 copies of the one-edge graph state (|00> + |01> + |10> - |11>)/2 with
/// A0 = X, A1 = Z, B0 = (Z + X)/sqrt2, B1 = (Z - X)/sqrt2 on every subtest.
Strategy ideal_strategy(std::size_t n);

/// bob_rotation conjugates Bob's observables by exp(-i eta Y / 2).
/// partial_entanglement prepares cos(theta)|0>|+> + sin(theta)|1>|-> per pair
/// with the ideal measurements; theta = pi/4 is the ideal pair.
Strategy noisy_strategy(std::size_t n, const NoiseSpec &noise);

struct ValidationReport {
    double hermiticity = 0.0;
    double unitarity = 0.0;
    double commutation = 0.0;
    double normalization = 0.0;
    /// Structural problems (wrong counts or dimensions). Any entry fails validation.
    std::vector<std::string> problems;

    bool passed() const;
};

ValidationReport validate(const Strategy &strategy);

/// Throws std::invalid_argument with the validation diagnostics if `strategy` fails.
void require_valid(const Strategy &strategy);

/// prod_k (I + (-1)^{a_k} M_k) / 2 for the party's observables on `question`.
ComplexMatrix joint_projector(const Strategy &strategy, Party party, const BitString &question,
                              const BitString &answer);

struct AnswerPair {
    BitString alice;
    BitString bob;
};

/// Born-rule sampler using sequential conditional measurement of each answer
/// bit. Holds scratch buffers, so one instance per thread.
class AnswerSampler {
   public:
    explicit AnswerSampler(const Strategy &strategy);

    AnswerPair sample(const BitString &q_alice, const BitString &q_bob, std::mt19937_64 &rng);

   private:
    bool measure_bit(Party party, const ComplexMatrix &observable, std::mt19937_64 &rng);

    const Strategy &strategy_;
    StateVector current_;
    std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

AnswerPair sample_answers(const Strategy &strategy, const BitString &q_alice, const BitString &q_bob,
                          std::mt19937_64 &rng);

}  // namespace pchsh
