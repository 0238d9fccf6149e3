#include "pchsh/game.h"

#include <cmath>
#include <random>
#include <stdexcept>
#include <thread>

namespace pchsh {

namespace {

double sign_of(bool odd) { return odd ? -1.0 : 1.0; }

void check_questions(const Strategy &strategy, const BitString &q_alice, const BitString &q_bob, std::size_t k) {
    if (q_alice.size() != strategy.subtests() || q_bob.size() != strategy.subtests()) {
        throw std::invalid_argument("questions must have length n/2");
    }
    if (k >= strategy.subtests()) {
        throw std::out_of_range("subtest index out of range");
    }
}

}  // namespace

bool win(const BitString &q, std::size_t k, bool x_k, bool y_k) {
    if (q.size() % 2 != 0 || q.size() == 0) {
        throw std::invalid_argument("question must have even, nonzero length");
    }
    std::size_t half = q.size() / 2;
    if (k >= half) {
        throw std::out_of_range("subtest index out of range");
    }
    return (q[k] && q[k + half]) == (x_k != y_k);
}

double subtest_value(const Strategy &strategy, const BitString &q_alice, const BitString &q_bob, std::size_t k) {
    check_questions(strategy, q_alice, q_bob, k);
    double total = 0.0;
    for (const BitString &ra : {q_alice, q_alice.complement()}) {
        for (const BitString &rb : {q_bob, q_bob.complement()}) {
            Complex e = bipartite_expectation(strategy.alice(ra, k), strategy.bob(rb, k), strategy.state, strategy.shape);
            total += sign_of(ra[k] && rb[k]) * e.real();
        }
    }
    return total;
}

CorrelationTable::CorrelationTable(const Strategy &strategy) : n_(strategy.n) {
    if (strategy.n < 2 || strategy.n % 2 != 0) {
        throw std::invalid_argument("n must be even and at least 2");
    }
    if (strategy.n > kMaxExactN) {
        throw std::invalid_argument("exhaustive sums are limited to n <= " + std::to_string(kMaxExactN));
    }
    if (strategy.state.size() != strategy.shape.total()) {
        throw std::invalid_argument("state dimension mismatch");
    }
    std::size_t m = subtests();
    std::size_t questions = strategy.question_count();
    corr_.assign(questions * questions * m, 0.0);

    // psi(a, b) = state[a * dim_b + b]; <M (x) N> = sum_ij (psi^dag M psi)_ij N_ij.
    const BipartiteShape shape = strategy.shape;
    ComplexMatrix psi = Eigen::Map<const ComplexMatrix>(strategy.state.data(), shape.dim_b, shape.dim_a).transpose();
    ComplexMatrix psi_adj = psi.adjoint();
    for (std::uint64_t qa = 0; qa < questions; ++qa) {
        BitString ra(m, qa);
        for (std::size_t k = 0; k < m; ++k) {
            ComplexMatrix reduced = psi_adj * strategy.alice(ra, k) * psi;
            for (std::uint64_t qb = 0; qb < questions; ++qb) {
                const ComplexMatrix &bob = strategy.bob(BitString(m, qb), k);
                if (bob.rows() != shape.dim_b || bob.cols() != shape.dim_b) {
                    throw std::invalid_argument("Bob observable dimension mismatch");
                }
                corr_[index(qa, qb, k)] = reduced.cwiseProduct(bob).sum().real();
            }
        }
    }
}

std::size_t CorrelationTable::index(std::uint64_t qa, std::uint64_t qb, std::size_t k) const {
    std::size_t questions = std::size_t{1} << subtests();
    return (qa * questions + qb) * subtests() + k;
}

double CorrelationTable::correlation(const BitString &q_alice, const BitString &q_bob, std::size_t k) const {
    if (q_alice.size() != subtests() || q_bob.size() != subtests() || k >= subtests()) {
        throw std::invalid_argument("question or subtest out of range for this table");
    }
    return corr_[index(q_alice.value(), q_bob.value(), k)];
}

double CorrelationTable::subtest_raw(std::uint64_t qa, std::uint64_t qb, std::size_t k) const {
    std::size_t m = subtests();
    std::uint64_t all = (std::uint64_t{1} << m) - 1;
    std::uint64_t bit = std::uint64_t{1} << (m - 1 - k);
    double total = 0.0;
    for (std::uint64_t ra : {qa, qa ^ all}) {
        for (std::uint64_t rb : {qb, qb ^ all}) {
            total += sign_of((ra & bit) && (rb & bit)) * corr_[index(ra, rb, k)];
        }
    }
    return total;
}

double CorrelationTable::subtest(const BitString &q_alice, const BitString &q_bob, std::size_t k) const {
    if (q_alice.size() != subtests() || q_bob.size() != subtests() || k >= subtests()) {
        throw std::invalid_argument("question or subtest out of range for this table");
    }
    return subtest_raw(q_alice.value(), q_bob.value(), k);
}

double CorrelationTable::value() const {
    std::size_t m = subtests();
    std::uint64_t questions = std::uint64_t{1} << m;
    double total = 0.0;
    for (std::uint64_t qb = 0; qb < questions; ++qb) {
        for (std::uint64_t qa = 0; qa < questions; ++qa) {
            for (std::size_t k = 0; k < m; ++k) {
                total += subtest_raw(qa, qb, k);
            }
        }
    }
    return total / (static_cast<double>(n_) * std::ldexp(1.0, static_cast<int>(n_) - 1));
}

double CorrelationTable::bob_question_average(const BitString &q_bob) const {
    if (q_bob.size() != subtests()) {
        throw std::invalid_argument("question length must be n/2");
    }
    std::size_t m = subtests();
    std::uint64_t questions = std::uint64_t{1} << m;
    double total = 0.0;
    for (std::uint64_t qa = 0; qa < questions; ++qa) {
        for (std::size_t k = 0; k < m; ++k) {
            total += subtest_raw(qa, q_bob.value(), k);
        }
    }
    return total / (static_cast<double>(n_) * std::ldexp(1.0, static_cast<int>(m) - 1));
}

double CorrelationTable::alice_question_average(const BitString &q_alice, const BitString &q_bob) const {
    if (q_alice.size() != subtests() || q_bob.size() != subtests()) {
        throw std::invalid_argument("question length must be n/2");
    }
    double total = 0.0;
    for (std::size_t k = 0; k < subtests(); ++k) {
        total += subtest_raw(q_alice.value(), q_bob.value(), k);
    }
    return 2.0 * total / static_cast<double>(n_);
}

GameValue exact_value(const Strategy &strategy) {
    CorrelationTable table(strategy);
    GameValue out;
    out.value = table.value();
    out.mode = ValueMode::exact;
    out.win_probability = 0.5 * (1.0 + out.value / 4.0);
    return out;
}

GameValue referee_simulate(const Strategy &strategy, std::uint64_t rounds, std::uint64_t seed, unsigned workers) {
    if (rounds < 1) {
        throw std::invalid_argument("rounds must be at least 1");
    }
    if (workers < 1) {
        throw std::invalid_argument("workers must be at least 1");
    }
    if (strategy.state.size() != strategy.shape.total()) {
        throw std::invalid_argument("state dimension mismatch");
    }
    std::size_t m = strategy.subtests();
    std::vector<std::uint64_t> wins(workers, 0);
    auto run = [&](unsigned w) {
        std::uint64_t share = rounds / workers + (w < rounds % workers ? 1 : 0);
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(w)};
        std::mt19937_64 rng(seq);
        std::uniform_int_distribution<std::uint64_t> question(0, (std::uint64_t{1} << m) - 1);
        std::uniform_int_distribution<std::size_t> subtest(0, m - 1);
        AnswerSampler sampler(strategy);
        std::uint64_t count = 0;
        for (std::uint64_t r = 0; r < share; ++r) {
            BitString qa(m, question(rng));
            BitString qb(m, question(rng));
            AnswerPair answers = sampler.sample(qa, qb, rng);
            std::size_t k = subtest(rng);
            if (win(BitString::concat(qa, qb), k, answers.alice[k], answers.bob[k])) {
                ++count;
            }
        }
        wins[w] = count;
    };
    if (workers == 1) {
        run(0);
    } else {
        std::vector<std::thread> threads;
        for (unsigned w = 0; w < workers; ++w) {
            threads.emplace_back(run, w);
        }
        for (auto &t : threads) {
            t.join();
        }
    }

    std::uint64_t total_wins = 0;
    for (auto c : wins) {
        total_wins += c;
    }
    double r = static_cast<double>(rounds);
    double p = static_cast<double>(total_wins) / r;
    GameValue out;
    out.mode = ValueMode::sampled;
    out.rounds = rounds;
    out.seed = seed;
    out.workers = workers;
    out.win_probability = p;
    out.value = 4.0 * (2.0 * p - 1.0);
    if (rounds > 1) {
        // Scores are +/-4, so the sample variance follows from the mean alone.
        double variance = std::max(0.0, (16.0 - out.value * out.value) * r / (r - 1.0));
        out.standard_error = std::sqrt(variance / r);
    }
    return out;
}

}  // namespace pchsh
