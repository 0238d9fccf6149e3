#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pchsh/bitstring.h"
#include "pchsh/extraction.h"
#include "pchsh/linalg.h"
#include "pchsh/strategy.h"

namespace pchsh {

/// Largest n with exhaustive (s, t) coverage under the automatic policy.
inline constexpr std::size_t kExhaustiveMaxN = 6;
/// Largest n accepted by certify.
inline constexpr std::size_t kMaxCertifyN = 8;
inline constexpr std::size_t kDefaultConditionSamples = 10000;
inline constexpr std::size_t kDefaultDistanceSamples = 256;
/// Slack on measured <= certified comparisons.
inline constexpr double kBoundSlack = 1e-9;
/// Slack on the pigeonhole guarantees, which hold exactly in real arithmetic.
inline constexpr double kGuaranteeSlack = 1e-12;
/// Values within this distance of 2 sqrt2 are reported as epsilon = 0.
inline constexpr double kValueResolution = 1e-12;
/// Partial overlaps below this mean no junk state can be extracted.
inline constexpr double kJunkFloor = 1e-12;

enum class CoverageMode { exhaustive, sampled };

struct Coverage {
    CoverageMode mode = CoverageMode::exhaustive;
    std::size_t samples = kDefaultConditionSamples;
    std::uint64_t seed = 0;

    /// Exhaustive iff n <= kExhaustiveMaxN.
    static Coverage automatic(std::size_t n, std::size_t samples = kDefaultConditionSamples, std::uint64_t seed = 0);
};

struct ConditionNorms {
    /// max_{k != l} ||X'_k Z'_l psi - Z'_l X'_k psi||
    double eps1 = 0.0;
    /// max_k ||X'_k psi - Z'_{k+n/2 mod n} psi||
    double eps2 = 0.0;
    /// max_k ||Z'_k X'_k psi + X'_k Z'_k psi||
    double eps3 = 0.0;
    /// max_{s,t} ||Z'^t X'^s psi - (-1)^{s.t} X'^s Z'^t psi||
    double general_anticommute_max = 0.0;
    /// max_s ||Z'^{s_b s_a} psi - (-1)^{s_a.s_b} X'^s psi||
    double general_swap_max = 0.0;
    Coverage coverage;
    std::size_t pairs_checked = 0;

    double max_eps() const;
};

/// Fills eps1, eps2, eps3 on the strategy's state.
ConditionNorms measure_epsilons(const Strategy &strategy, const ExtractedOperators &ops);

/// Returns `base` with the general-condition maxima and coverage filled in.
ConditionNorms measure_general_conditions(const Strategy &strategy, const ExtractedOperators &ops,
                                          const Coverage &coverage, ConditionNorms base = {});

/// X'^s v with the smallest index leftmost.
StateVector apply_x_product(const ExtractedOperators &ops, const BitString &s, const StateVector &v);
/// Z'^t v with the smallest index leftmost.
StateVector apply_z_product(const ExtractedOperators &ops, const BitString &t, const StateVector &v);

/// Swap isometry output as a dim_A*dim_B x 2^n matrix: entry (sys, anc) is the
/// amplitude of |sys>|anc>, ancilla k being bit k of `anc` (ancilla 0 most
/// significant, Alice's ancillas before Bob's). For k = 0..n-1 in order the
/// map u|0> -> (1/2)[(I + Z'_k) u |0> + X'_k (I - Z'_k) u |1>] is applied.
ComplexMatrix swap_isometry_matrix(const ExtractedOperators &ops, const StateVector &v);

/// Flattened swap_isometry_matrix: index sys * 2^n + anc.
StateVector swap_isometry_apply(const ExtractedOperators &ops, const StateVector &v);

/// The ideal n-qubit state 2^{-n/2} sum_u (-1)^{u_a.u_b} |u>, qubit 0 most significant.
StateVector ideal_target_state(std::size_t n);

/// X^q Z^p applied to an n-qubit register vector.
StateVector apply_pauli_string(const BitString &p, const BitString &q, const StateVector &v);

class JunkExtractionError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

enum class JunkPolicy { fixed, optimal };

struct DistancePair {
    double fixed = 0.0;
    double optimal = 0.0;
};

/// Computes ||Phi(X'^q Z'^p psi') - junk (x) X^q Z^p psi||. The fixed junk is
/// the normalized partial overlap of Phi(psi') with psi over the ancillas; the
/// optimal junk minimizes the norm separately for each (p, q).
class ExtractionDistance {
   public:
    /// Throws JunkExtractionError when the partial overlap is below kJunkFloor.
    ExtractionDistance(const Strategy &strategy, const ExtractedOperators &ops);

    DistancePair operator()(const BitString &p, const BitString &q) const;

    double junk_norm() const { return junk_norm_; }
    const StateVector &junk() const { return junk_; }

   private:
    const Strategy &strategy_;
    const ExtractedOperators &ops_;
    StateVector target_;
    StateVector junk_;
    double junk_norm_ = 0.0;
};

double extraction_distance(const Strategy &strategy, const ExtractedOperators &ops, const BitString &p,
                           const BitString &q, JunkPolicy policy);

struct CertifiedEpsilons {
    double eps1 = 0.0;
    double eps2 = 0.0;
    double eps3 = 0.0;
};

/// eps1 = 32 (delta sqrt2)^{1/4}, eps2 = 4 (delta sqrt2)^{1/4}, eps3 = 4 (delta sqrt2)^{1/2}.
CertifiedEpsilons certified_epsilons(double delta);

struct DistanceEntry {
    BitString p;
    BitString q;
    double fixed = 0.0;
    double optimal = 0.0;
};

struct CertifyOptions {
    /// Unset means Coverage::automatic(n) with seed 0.
    std::optional<Coverage> coverage;
    /// (p, q) pairs drawn when the distance map is not exhaustive.
    std::size_t distance_samples = kDefaultDistanceSamples;
    bool general_conditions = true;
};

struct SelfTestReport {
    std::size_t n = 0;
    double value = 0.0;
    /// max(0, 2 sqrt2 - value)
    double epsilon = 0.0;
    RelabelTranscript transcript;
    QuestionSearchResult questions;
    double best_qb_average = 0.0;
    double value_after_canonicalization = 0.0;
    /// n * epsilon
    double delta_cert = 0.0;
    CertifiedEpsilons certified;
    ConditionNorms measured;
    OperatorDiagnostics operators;
    std::vector<DistanceEntry> distances;
    CoverageMode distance_coverage = CoverageMode::exhaustive;
    double dist_fixed_max = 0.0;
    double dist_opt_max = 0.0;
    double junk_norm = 0.0;
    /// general_anticommute_max / (n^2 max eps); unset when undefined.
    std::optional<double> general_ratio;
    /// dist_fixed_max / (n^{9/8} epsilon^{1/8}); unset when epsilon = 0.
    std::optional<double> distance_ratio;

    bool eps1_pass = false;
    bool eps2_pass = false;
    bool eps3_pass = false;
    bool qb_guarantee = false;
    bool subtest_guarantee = false;
    bool pair_guarantee = false;
    bool operators_valid = false;
    std::vector<std::string> violations;

    bool all_passed() const { return violations.empty(); }
};

/// Full pipeline: value, canonicalization, question searches, certified and
/// measured epsilons, and the distance map. Guarantee failures are recorded
/// as violations. Throws std::invalid_argument if n > kMaxCertifyN or the
/// strategy fails validation.
SelfTestReport certify(const Strategy &strategy, const CertifyOptions &options = {});

}  // namespace pchsh
