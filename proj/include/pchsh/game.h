#pragma once

#include <cstddef>
#include <cstdint>
#include <numbers>
#include <vector>

#include "pchsh/bitstring.h"
#include "pchsh/strategy.h"

namespace pchsh {

/// Quantum optimum of the CHSH expression.
inline constexpr double kTsirelsonBound = 2.0 * std::numbers::sqrt2;
/// Exhaustive sums over question pairs are refused above this n.
inline constexpr std::size_t kMaxExactN = 12;

/// True iff q_k * q_{k+n/2} == x_k xor y_k. `q` is the full n-bit question,
/// `k` a 0-based subtest index.
bool win(const BitString &q, std::size_t k, bool x_k, bool y_k);

/// CHSH value of subtest k using the observables of q_a, its complement, q_b
/// and its complement: sum over r_a, r_b of (-1)^{(r_a)_k (r_b)_k} <M^{r_a}_k N^{r_b}_k>.
double subtest_value(const Strategy &strategy, const BitString &q_alice, const BitString &q_bob, std::size_t k);

enum class ValueMode { exact, sampled };

struct GameValue {
    double value = 0.0;
    ValueMode mode = ValueMode::exact;
    /// Win probability p with value = 4 (2p - 1).
    double win_probability = 0.0;
    std::uint64_t rounds = 0;
    double standard_error = 0.0;
    std::uint64_t seed = 0;
    unsigned workers = 0;
};

/// All two-point correlators <M^{q_a}_k (x) N^{q_b}_k> of a strategy, from
/// which the subtest values and the averaged quantities used by the
/// pigeonhole searches are read off. Requires n <= kMaxExactN.
class CorrelationTable {
   public:
    explicit CorrelationTable(const Strategy &strategy);

    std::size_t n() const { return n_; }
    std::size_t subtests() const { return n_ / 2; }

    double correlation(const BitString &q_alice, const BitString &q_bob, std::size_t k) const;
    /// Same as subtest_value, from the cached correlators.
    double subtest(const BitString &q_alice, const BitString &q_bob, std::size_t k) const;
    /// (1/(n 2^{n-1})) sum_{q_b, q_a, k} f.
    double value() const;
    /// g(q_b) = (1/(n 2^{n/2-1})) sum_{q_a, k} f(q_a, q_b, k); its mean over q_b is value().
    double bob_question_average(const BitString &q_bob) const;
    /// (2/n) sum_k f(q_a, q_bob, k); its mean over q_a is bob_question_average(q_bob).
    double alice_question_average(const BitString &q_alice, const BitString &q_bob) const;

   private:
    std::size_t index(std::uint64_t qa, std::uint64_t qb, std::size_t k) const;
    double subtest_raw(std::uint64_t qa, std::uint64_t qb, std::size_t k) const;

    std::size_t n_;
    std::vector<double> corr_;
};

/// Exact game value. Throws std::invalid_argument if n > kMaxExactN.
GameValue exact_value(const Strategy &strategy);

/// Monte Carlo referee: uniform question, Born-rule answers, uniform subtest,
/// +4 on a win and -4 otherwise. Rounds are split across `workers` threads,
/// each seeded from (seed, worker index); output is reproducible for a fixed
/// (seed, workers) pair.
GameValue referee_simulate(const Strategy &strategy, std::uint64_t rounds, std::uint64_t seed,
                           unsigned workers = 1);

}  // namespace pchsh
