#include "pchsh/extraction.h"

#include <algorithm>
#include <bit>
#include <stdexcept>

namespace pchsh {

namespace {

void require_subtest(const Strategy &strategy, std::size_t k) {
    if (k >= strategy.subtests()) {
        throw std::out_of_range("subtest index " + std::to_string(k) + " out of range");
    }
}

// Re-keys `rekeyed` by q -> q xor 1_k and flips the sign of the other party's
// k-th observable on questions with bit k set.
Strategy relabel(const Strategy &strategy, std::size_t k, Party party) {
    require_subtest(strategy, k);
    Strategy out = strategy;
    std::size_t m = strategy.subtests();
    auto &rekeyed = party == Party::alice ? out.alice_obs : out.bob_obs;
    auto &signed_side = party == Party::alice ? out.bob_obs : out.alice_obs;
    const auto &source = party == Party::alice ? strategy.alice_obs : strategy.bob_obs;
    std::uint64_t flip = BitString::unit(m, k).value();
    for (std::uint64_t q = 0; q < rekeyed.size(); ++q) {
        rekeyed[q] = source.at(q ^ flip);
    }
    for (std::uint64_t q = 0; q < signed_side.size(); ++q) {
        if (BitString(m, q)[k]) {
            signed_side[q].at(k) = -signed_side[q].at(k);
        }
    }
    return out;
}

}  // namespace

bool OperatorDiagnostics::passed() const {
    return hermiticity <= kValidationTol && unitarity <= kValidationTol && alice_commutation <= kValidationTol;
}

OperatorDiagnostics check_operators(const ExtractedOperators &ops) {
    OperatorDiagnostics d;
    for (const auto *family : {&ops.x_ops, &ops.z_ops}) {
        for (const auto &m : *family) {
            d.hermiticity = std::max(d.hermiticity, hermiticity_residual(m));
            d.unitarity = std::max(d.unitarity, unitarity_residual(m));
        }
        for (std::size_t k = 0; k < ops.subtests(); ++k) {
            for (std::size_t l = k + 1; l < ops.subtests(); ++l) {
                d.alice_commutation = std::max(d.alice_commutation, commutator_residual((*family)[k], (*family)[l]));
            }
        }
    }
    return d;
}

ExtractedOperators build_xz(const Strategy &strategy, double zero_tol) {
    std::size_t m = strategy.subtests();
    BitString zeros = BitString::zeros(m);
    BitString ones = BitString::ones(m);
    ExtractedOperators ops;
    ops.n = strategy.n;
    ops.shape = strategy.shape;
    ops.x_ops.resize(strategy.n);
    ops.z_ops.resize(strategy.n);
    for (std::size_t k = 0; k < m; ++k) {
        ops.x_ops[k] = strategy.alice(zeros, k);
        ops.z_ops[k] = strategy.alice(ones, k);
        const ComplexMatrix &b0 = strategy.bob(zeros, k);
        const ComplexMatrix &b1 = strategy.bob(ones, k);
        ops.x_ops[k + m] = sign_normalize(b0 - b1, zero_tol);
        ops.z_ops[k + m] = sign_normalize(b0 + b1, zero_tol);
    }
    return ops;
}

Strategy relabel_alice_bit(const Strategy &strategy, std::size_t k) { return relabel(strategy, k, Party::alice); }

Strategy relabel_bob_bit(const Strategy &strategy, std::size_t k) { return relabel(strategy, k, Party::bob); }

Strategy apply_relabels(const Strategy &strategy, const RelabelTranscript &transcript) {
    Strategy out = strategy;
    for (const auto &step : transcript) {
        out = relabel(out, step.bit, step.party);
    }
    return out;
}

namespace {

template <typename Score>
BitString argmax_question(std::size_t m, Score &&score) {
    std::uint64_t questions = std::uint64_t{1} << m;
    std::uint64_t best = 0;
    double best_score = score(BitString(m, 0));
    for (std::uint64_t q = 1; q < questions; ++q) {
        double s = score(BitString(m, q));
        if (s > best_score + kTieTol) {
            best = q;
            best_score = s;
        }
    }
    return BitString(m, best);
}

}  // namespace

BitString find_best_qb(const CorrelationTable &table) {
    return argmax_question(table.subtests(), [&](const BitString &qb) { return table.bob_question_average(qb); });
}

BitString find_best_qb(const Strategy &strategy) { return find_best_qb(CorrelationTable(strategy)); }

BitString find_best_qa(const CorrelationTable &table) {
    BitString zeros = BitString::zeros(table.subtests());
    return argmax_question(table.subtests(),
                           [&](const BitString &qa) { return table.alice_question_average(qa, zeros); });
}

BitString find_best_qa(const Strategy &strategy) { return find_best_qa(CorrelationTable(strategy)); }

CanonicalForm canonicalize(const Strategy &strategy) {
    std::size_t m = strategy.subtests();
    CanonicalForm out;

    CorrelationTable before(strategy);
    out.value_before = before.value();
    out.q_b_star = find_best_qb(before);
    out.best_qb_average = before.bob_question_average(out.q_b_star);

    Strategy current = strategy;
    for (std::size_t k = 0; k < m; ++k) {
        if (out.q_b_star[k]) {
            current = relabel_bob_bit(current, k);
            out.transcript.push_back({Party::bob, k});
        }
    }

    CorrelationTable middle(current);
    out.q_a_star = find_best_qa(middle);
    out.best_qa_average = middle.alice_question_average(out.q_a_star, BitString::zeros(m));
    for (std::size_t k = 0; k < m; ++k) {
        if (out.q_a_star[k]) {
            current = relabel_alice_bit(current, k);
            out.transcript.push_back({Party::alice, k});
        }
    }

    out.value_after = CorrelationTable(current).value();
    out.strategy = std::move(current);
    return out;
}

BitString find_pair_question(const CorrelationTable &table, std::size_t k, std::size_t l) {
    std::size_t m = table.subtests();
    if (k >= m || l >= m) {
        throw std::out_of_range("subtest index out of range");
    }
    if (k == l) {
        throw std::invalid_argument("find_pair_question needs two distinct subtests");
    }
    BitString zeros = BitString::zeros(m);
    std::uint64_t questions = std::uint64_t{1} << m;
    bool have = false;
    BitString best;
    double best_score = 0.0;
    for (std::uint64_t q = 0; q < questions; ++q) {
        BitString candidate(m, q);
        if (candidate[k] == candidate[l]) {
            continue;
        }
        double score = std::min(table.subtest(candidate, zeros, k), table.subtest(candidate, zeros, l));
        BitString rep = candidate[k] ? candidate.complement() : candidate;
        bool better = !have || score > best_score + kTieTol || (score >= best_score - kTieTol && rep < best);
        if (better) {
            best = rep;
            best_score = score;
            have = true;
        }
    }
    return best;
}

BitString find_pair_question(const Strategy &strategy, std::size_t k, std::size_t l) {
    return find_pair_question(CorrelationTable(strategy), k, l);
}

QuestionSearchResult search_questions(const CanonicalForm &canonical) {
    const Strategy &s = canonical.strategy;
    std::size_t m = s.subtests();
    CorrelationTable table(s);
    BitString zeros = BitString::zeros(m);

    QuestionSearchResult out;
    out.q_b_star = canonical.q_b_star;
    out.q_a_star = canonical.q_a_star;
    for (std::size_t k = 0; k < m; ++k) {
        out.per_subtest_delta.push_back(std::max(0.0, kTsirelsonBound - table.subtest(zeros, zeros, k)));
    }
    for (std::size_t k = 0; k < m; ++k) {
        for (std::size_t l = k + 1; l < m; ++l) {
            BitString q = find_pair_question(table, k, l);
            double score = std::min(table.subtest(q, zeros, k), table.subtest(q, zeros, l));
            out.pair_questions[{k, l}] = {q, score};
        }
    }
    return out;
}

std::vector<BitString> log_question_set(std::size_t n) {
    if (n < 2 || n % 2 != 0) {
        throw std::invalid_argument("n must be even and at least 2");
    }
    std::size_t m = n / 2;
    if (m > BitString::kMaxLength) {
        throw std::invalid_argument("n/2 exceeds the 64-bit question limit");
    }
    std::vector<BitString> out;
    if (m < 2) {
        return out;
    }
    // ceil(log2(m + 1)) is the bit width of m.
    std::size_t count = static_cast<std::size_t>(std::bit_width(m));
    for (std::size_t j = 0; j < count; ++j) {
        BitString q = BitString::zeros(m);
        for (std::size_t k = 0; k < m; ++k) {
            if (((k + 1) >> j) & 1) {
                q = q.with_bit(k, true);
            }
        }
        out.push_back(q);
    }
    return out;
}

}  // namespace pchsh
