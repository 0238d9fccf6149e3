#pragma once

#include <cstddef>
#include <map>
#include <utility>
#include <vector>

#include "pchsh/bitstring.h"
#include "pchsh/game.h"
#include "pchsh/linalg.h"
#include "pchsh/strategy.h"

namespace pchsh {

/// Values closer than this are treated as ties by the argmax searches, which
/// then prefer the lexicographically smallest question.
inline constexpr double kTieTol = 1e-12;

/// Self-testing operators X'_i, Z'_i for i in [0, n). Indices below n/2 act on
/// H_A, the rest on H_B; index i + n/2 is Bob's partner of Alice's i.
struct ExtractedOperators {
    std::size_t n = 0;
    BipartiteShape shape;
    std::vector<ComplexMatrix> x_ops;
    std::vector<ComplexMatrix> z_ops;

    std::size_t subtests() const { return n / 2; }
    bool on_alice(std::size_t i) const { return i < subtests(); }
    /// Index of the partner qubit, (i + n/2) mod n.
    std::size_t partner(std::size_t i) const { return (i + subtests()) % n; }
};

struct OperatorDiagnostics {
    double hermiticity = 0.0;
    double unitarity = 0.0;
    /// Max commutator residual among Alice's X' and among Alice's Z'.
    double alice_commutation = 0.0;

    bool passed() const;
};

OperatorDiagnostics check_operators(const ExtractedOperators &ops);

/// Alice: X'_k = M^{0..0}_k, Z'_k = M^{1..1}_k. Bob: X' = sign(N^{0..0}_k - N^{1..1}_k)
/// and Z' = sign(N^{0..0}_k + N^{1..1}_k). Bob's X'/Z' roles are chosen so that
/// X'_A pairs with Z'_B, and Z'_A with X'_B, on strategies near the optimum.
ExtractedOperators build_xz(const Strategy &strategy, double zero_tol = kDefaultZeroTol);

/// Re-keys Alice's table by q_a -> q_a xor 1_k and multiplies Bob's k-th
/// observable on question q_b by (-1)^{(q_b)_k}. Preserves the game value.
Strategy relabel_alice_bit(const Strategy &strategy, std::size_t k);
/// Mirror image of relabel_alice_bit with the parties exchanged.
Strategy relabel_bob_bit(const Strategy &strategy, std::size_t k);

struct RelabelStep {
    Party party = Party::alice;
    std::size_t bit = 0;

    bool operator==(const RelabelStep &) const = default;
};
using RelabelTranscript = std::vector<RelabelStep>;

Strategy apply_relabels(const Strategy &strategy, const RelabelTranscript &transcript);

/// argmax_{q_b} of CorrelationTable::bob_question_average.
BitString find_best_qb(const CorrelationTable &table);
BitString find_best_qb(const Strategy &strategy);
/// argmax_{q_a} of CorrelationTable::alice_question_average with q_b = 0..0.
BitString find_best_qa(const CorrelationTable &table);
BitString find_best_qa(const Strategy &strategy);

struct CanonicalForm {
    Strategy strategy;
    RelabelTranscript transcript;
    BitString q_b_star;
    BitString q_a_star;
    /// g(q_b*) before any relabeling.
    double best_qb_average = 0.0;
    /// (2/n) sum_k f(q_a*, 0..0, k) after the Bob-side remap.
    double best_qa_average = 0.0;
    double value_before = 0.0;
    double value_after = 0.0;
};

/// Relabels so the pigeonhole-selected q_b and then q_a become 0..0.
CanonicalForm canonicalize(const Strategy &strategy);

/// For a canonical strategy: the q_a with bits (k, l) = (0, 1) maximizing
/// min(f(q_a, 0..0, k), f(q_a, 0..0, l)). Questions with (1, 0) are folded in
/// through their complements, on which f is unchanged.
BitString find_pair_question(const CorrelationTable &table, std::size_t k, std::size_t l);
BitString find_pair_question(const Strategy &strategy, std::size_t k, std::size_t l);

struct PairQuestion {
    BitString question;
    /// min over j in {k, l} of f(question, 0..0, j).
    double min_subtest_value = 0.0;
};

struct QuestionSearchResult {
    BitString q_b_star;
    BitString q_a_star;
    /// max(0, 2 sqrt2 - f(0..0, 0..0, k)) on the canonical strategy.
    std::vector<double> per_subtest_delta;
    std::map<std::pair<std::size_t, std::size_t>, PairQuestion> pair_questions;
};

/// Per-subtest deltas and pair questions (for every k < l) of a canonical form.
QuestionSearchResult search_questions(const CanonicalForm &canonical);

/// Questions q^{(j)} whose bit k is bit j of the 1-based index k + 1, for
/// j < ceil(log2(n/2 + 1)). Every pair of subtests differs on some question.
/// Empty when n/2 < 2.
std::vector<BitString> log_question_set(std::size_t n);

}  // namespace pchsh
