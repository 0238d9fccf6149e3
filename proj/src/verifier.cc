#include "pchsh/verifier.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <random>

#include "pchsh/game.h"

namespace pchsh {

namespace {

StateVector apply_single(const ExtractedOperators &ops, const ComplexMatrix &op, std::size_t index,
                         const StateVector &v) {
    return ops.on_alice(index) ? apply_alice(op, v, ops.shape) : apply_bob(op, v, ops.shape);
}

StateVector apply_x(const ExtractedOperators &ops, std::size_t i, const StateVector &v) {
    return apply_single(ops, ops.x_ops[i], i, v);
}

StateVector apply_z(const ExtractedOperators &ops, std::size_t i, const StateVector &v) {
    return apply_single(ops, ops.z_ops[i], i, v);
}

StateVector apply_product(const ExtractedOperators &ops, const std::vector<ComplexMatrix> &family,
                          const BitString &bits, const StateVector &v) {
    if (bits.size() != ops.n) {
        throw std::invalid_argument("operator product index string must have length n");
    }
    StateVector out = v;
    // The leftmost factor has the smallest index, so it acts last.
    for (std::size_t i = ops.n; i-- > 0;) {
        if (bits[i]) {
            out = apply_single(ops, family[i], i, out);
        }
    }
    return out;
}

void check_ops(const ExtractedOperators &ops, const StateVector &v) {
    if (ops.x_ops.size() != ops.n || ops.z_ops.size() != ops.n || ops.n == 0 || ops.n % 2 != 0) {
        throw std::invalid_argument("extracted operator family is incomplete");
    }
    if (v.size() != ops.shape.total()) {
        throw std::invalid_argument("state dimension does not match the extracted operators");
    }
}

double sign_of(std::size_t parity) { return parity % 2 ? -1.0 : 1.0; }

}  // namespace

Coverage Coverage::automatic(std::size_t n, std::size_t samples, std::uint64_t seed) {
    return {n <= kExhaustiveMaxN ? CoverageMode::exhaustive : CoverageMode::sampled, samples, seed};
}

double ConditionNorms::max_eps() const { return std::max({eps1, eps2, eps3}); }

ConditionNorms measure_epsilons(const Strategy &strategy, const ExtractedOperators &ops) {
    const StateVector &psi = strategy.state;
    check_ops(ops, psi);
    std::size_t n = ops.n;
    std::vector<StateVector> x_psi, z_psi;
    for (std::size_t i = 0; i < n; ++i) {
        x_psi.push_back(apply_x(ops, i, psi));
        z_psi.push_back(apply_z(ops, i, psi));
    }
    ConditionNorms out;
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t l = 0; l < n; ++l) {
            if (k == l) {
                continue;
            }
            double d = (apply_x(ops, k, z_psi[l]) - apply_z(ops, l, x_psi[k])).norm();
            out.eps1 = std::max(out.eps1, d);
        }
        out.eps2 = std::max(out.eps2, (x_psi[k] - z_psi[ops.partner(k)]).norm());
        out.eps3 = std::max(out.eps3, (apply_z(ops, k, x_psi[k]) + apply_x(ops, k, z_psi[k])).norm());
    }
    return out;
}

StateVector apply_x_product(const ExtractedOperators &ops, const BitString &s, const StateVector &v) {
    check_ops(ops, v);
    return apply_product(ops, ops.x_ops, s, v);
}

StateVector apply_z_product(const ExtractedOperators &ops, const BitString &t, const StateVector &v) {
    check_ops(ops, v);
    return apply_product(ops, ops.z_ops, t, v);
}

ConditionNorms measure_general_conditions(const Strategy &strategy, const ExtractedOperators &ops,
                                          const Coverage &coverage, ConditionNorms base) {
    const StateVector &psi = strategy.state;
    check_ops(ops, psi);
    std::size_t n = ops.n;
    base.coverage = coverage;
    base.general_anticommute_max = 0.0;
    base.general_swap_max = 0.0;
    base.pairs_checked = 0;

    auto anticommute = [&](const BitString &s, const BitString &t, const StateVector &xs_psi,
                           const StateVector &zt_psi) {
        StateVector lhs = apply_product(ops, ops.z_ops, t, xs_psi);
        StateVector rhs = apply_product(ops, ops.x_ops, s, zt_psi);
        return (lhs - sign_of(s.dot(t)) * rhs).norm();
    };
    auto swap_condition = [&](const BitString &s, const StateVector &xs_psi) {
        BitString t = BitString::concat(s.second_half(), s.first_half());
        StateVector lhs = apply_product(ops, ops.z_ops, t, psi);
        return (lhs - sign_of(s.first_half().dot(s.second_half())) * xs_psi).norm();
    };

    if (coverage.mode == CoverageMode::exhaustive) {
        std::uint64_t count = std::uint64_t{1} << n;
        std::vector<StateVector> x_cache, z_cache;
        x_cache.reserve(count);
        z_cache.reserve(count);
        for (std::uint64_t s = 0; s < count; ++s) {
            x_cache.push_back(apply_product(ops, ops.x_ops, BitString(n, s), psi));
            z_cache.push_back(apply_product(ops, ops.z_ops, BitString(n, s), psi));
        }
        for (std::uint64_t s = 0; s < count; ++s) {
            BitString sb(n, s);
            base.general_swap_max = std::max(base.general_swap_max, swap_condition(sb, x_cache[s]));
            for (std::uint64_t t = 0; t < count; ++t) {
                base.general_anticommute_max =
                    std::max(base.general_anticommute_max, anticommute(sb, BitString(n, t), x_cache[s], z_cache[t]));
                ++base.pairs_checked;
            }
        }
    } else {
        std::mt19937_64 rng(coverage.seed);
        std::uniform_int_distribution<std::uint64_t> draw(0, (std::uint64_t{1} << n) - 1);
        for (std::size_t i = 0; i < coverage.samples; ++i) {
            BitString s(n, draw(rng));
            BitString t(n, draw(rng));
            StateVector xs_psi = apply_product(ops, ops.x_ops, s, psi);
            StateVector zt_psi = apply_product(ops, ops.z_ops, t, psi);
            base.general_anticommute_max = std::max(base.general_anticommute_max, anticommute(s, t, xs_psi, zt_psi));
            base.general_swap_max = std::max(base.general_swap_max, swap_condition(s, xs_psi));
            ++base.pairs_checked;
        }
    }
    return base;
}

ComplexMatrix swap_isometry_matrix(const ExtractedOperators &ops, const StateVector &v) {
    check_ops(ops, v);
    std::size_t n = ops.n;
    Eigen::Index ancillas = Eigen::Index{1} << n;
    ComplexMatrix out = ComplexMatrix::Zero(v.size(), ancillas);
    out.col(0) = v;
    for (std::size_t k = 0; k < n; ++k) {
        Eigen::Index bit = Eigen::Index{1} << (n - 1 - k);
        Eigen::Index prefixes = Eigen::Index{1} << k;
        for (Eigen::Index prefix = 0; prefix < prefixes; ++prefix) {
            Eigen::Index col = prefix << (n - k);
            StateVector u = out.col(col);
            StateVector zu = apply_z(ops, k, u);
            out.col(col) = 0.5 * (u + zu);
            out.col(col | bit) = 0.5 * apply_x(ops, k, u - zu);
        }
    }
    return out;
}

StateVector swap_isometry_apply(const ExtractedOperators &ops, const StateVector &v) {
    ComplexMatrix w = swap_isometry_matrix(ops, v);
    StateVector flat(w.size());
    Eigen::Map<ComplexMatrix>(flat.data(), w.cols(), w.rows()) = w.transpose();
    return flat;
}

StateVector ideal_target_state(std::size_t n) {
    if (n < 2 || n % 2 != 0 || n > 2 * 31) {
        throw std::invalid_argument("ideal target needs even n >= 2");
    }
    std::size_t half = n / 2;
    std::uint64_t dim = std::uint64_t{1} << n;
    std::uint64_t low = (std::uint64_t{1} << half) - 1;
    StateVector psi(static_cast<Eigen::Index>(dim));
    double amp = std::ldexp(1.0, -static_cast<int>(half));
    for (std::uint64_t u = 0; u < dim; ++u) {
        std::uint64_t ua = u >> half;
        std::uint64_t ub = u & low;
        psi[static_cast<Eigen::Index>(u)] = sign_of(static_cast<std::size_t>(std::popcount(ua & ub))) * amp;
    }
    return psi;
}

StateVector apply_pauli_string(const BitString &p, const BitString &q, const StateVector &v) {
    if (p.size() != q.size() || v.size() != (Eigen::Index{1} << p.size())) {
        throw std::invalid_argument("Pauli string length does not match the register");
    }
    StateVector out(v.size());
    for (std::uint64_t u = 0; u < static_cast<std::uint64_t>(v.size()); ++u) {
        double sign = sign_of(static_cast<std::size_t>(std::popcount(p.value() & u)));
        out[static_cast<Eigen::Index>(u ^ q.value())] = sign * v[static_cast<Eigen::Index>(u)];
    }
    return out;
}

ExtractionDistance::ExtractionDistance(const Strategy &strategy, const ExtractedOperators &ops)
    : strategy_(strategy), ops_(ops), target_(ideal_target_state(ops.n)) {
    check_ops(ops, strategy.state);
    ComplexMatrix w = swap_isometry_matrix(ops, strategy.state);
    StateVector overlap = w * target_.conjugate();
    junk_norm_ = overlap.norm();
    if (junk_norm_ < kJunkFloor) {
        throw JunkExtractionError("isometry output has no overlap with the ideal state; no junk state exists");
    }
    junk_ = overlap / junk_norm_;
}

DistancePair ExtractionDistance::operator()(const BitString &p, const BitString &q) const {
    if (p.size() != ops_.n || q.size() != ops_.n) {
        throw std::invalid_argument("p and q must have length n");
    }
    StateVector moved = apply_product(ops_, ops_.x_ops, q, apply_product(ops_, ops_.z_ops, p, strategy_.state));
    ComplexMatrix w = swap_isometry_matrix(ops_, moved);
    StateVector ideal = apply_pauli_string(p, q, target_);

    DistancePair out;
    out.fixed = (w - junk_ * ideal.transpose()).norm();
    // Evaluated at the minimizing junk rather than through
    // sqrt(|W|^2 + 1 - 2|W conj(target)|), which cancels badly near zero.
    StateVector overlap = w * ideal.conjugate();
    double overlap_norm = overlap.norm();
    if (overlap_norm < kJunkFloor) {
        out.optimal = std::sqrt(w.squaredNorm() + 1.0);
    } else {
        out.optimal = (w - (overlap / overlap_norm) * ideal.transpose()).norm();
    }
    return out;
}

double extraction_distance(const Strategy &strategy, const ExtractedOperators &ops, const BitString &p,
                           const BitString &q, JunkPolicy policy) {
    ExtractionDistance eval(strategy, ops);
    DistancePair d = eval(p, q);
    return policy == JunkPolicy::fixed ? d.fixed : d.optimal;
}

CertifiedEpsilons certified_epsilons(double delta) {
    if (!(delta >= 0.0)) {
        throw std::invalid_argument("delta must be non-negative");
    }
    double base = delta * std::numbers::sqrt2;
    return {32.0 * std::pow(base, 0.25), 4.0 * std::pow(base, 0.25), 4.0 * std::sqrt(base)};
}

SelfTestReport certify(const Strategy &strategy, const CertifyOptions &options) {
    if (strategy.n > kMaxCertifyN) {
        throw std::invalid_argument("certify supports n <= " + std::to_string(kMaxCertifyN));
    }
    require_valid(strategy);

    SelfTestReport report;
    std::size_t n = strategy.n;
    std::size_t m = strategy.subtests();
    double nd = static_cast<double>(n);
    report.n = n;

    CanonicalForm canonical = canonicalize(strategy);
    report.value = canonical.value_before;
    report.epsilon = std::max(0.0, kTsirelsonBound - report.value);
    if (report.epsilon <= kValueResolution) {
        report.epsilon = 0.0;
    }
    report.transcript = canonical.transcript;
    report.best_qb_average = canonical.best_qb_average;
    report.value_after_canonicalization = canonical.value_after;

    report.qb_guarantee = canonical.best_qb_average >= report.value - kGuaranteeSlack;
    if (!report.qb_guarantee) {
        report.violations.push_back("best q_b average is below the game value");
    }
    if (std::abs(canonical.value_after - canonical.value_before) > 1e-9) {
        report.violations.push_back("canonicalization changed the game value");
    }

    report.questions = search_questions(canonical);
    double subtest_limit = (nd / 2.0) * report.epsilon;
    report.subtest_guarantee = true;
    for (std::size_t k = 0; k < m; ++k) {
        if (report.questions.per_subtest_delta[k] > subtest_limit + kGuaranteeSlack) {
            report.subtest_guarantee = false;
            report.violations.push_back("subtest " + std::to_string(k) + " delta exceeds (n/2) epsilon");
        }
    }
    double pair_floor = kTsirelsonBound - nd * report.epsilon;
    report.pair_guarantee = true;
    for (const auto &[key, pq] : report.questions.pair_questions) {
        if (pq.min_subtest_value < pair_floor - kGuaranteeSlack) {
            report.pair_guarantee = false;
            report.violations.push_back("pair question for subtests " + std::to_string(key.first) + "," +
                                        std::to_string(key.second) + " is below 2 sqrt2 - n epsilon");
        }
    }

    report.delta_cert = nd * report.epsilon;
    report.certified = certified_epsilons(report.delta_cert);

    ExtractedOperators ops = build_xz(canonical.strategy);
    report.operators = check_operators(ops);
    report.operators_valid = report.operators.passed();
    if (!report.operators_valid) {
        report.violations.push_back("extracted operators are not Hermitian, unitary and commuting on Alice's side");
    }

    Coverage coverage = options.coverage.value_or(Coverage::automatic(n));
    report.measured = measure_epsilons(canonical.strategy, ops);
    report.measured.coverage = coverage;
    if (options.general_conditions) {
        report.measured = measure_general_conditions(canonical.strategy, ops, coverage, report.measured);
    }
    report.eps1_pass = report.measured.eps1 <= report.certified.eps1 + kBoundSlack;
    report.eps2_pass = report.measured.eps2 <= report.certified.eps2 + kBoundSlack;
    report.eps3_pass = report.measured.eps3 <= report.certified.eps3 + kBoundSlack;
    if (!report.eps1_pass) report.violations.push_back("measured eps1 exceeds its certified bound");
    if (!report.eps2_pass) report.violations.push_back("measured eps2 exceeds its certified bound");
    if (!report.eps3_pass) report.violations.push_back("measured eps3 exceeds its certified bound");

    ExtractionDistance distance(canonical.strategy, ops);
    report.junk_norm = distance.junk_norm();
    auto record = [&](const BitString &p, const BitString &q) {
        DistancePair d = distance(p, q);
        report.distances.push_back({p, q, d.fixed, d.optimal});
        report.dist_fixed_max = std::max(report.dist_fixed_max, d.fixed);
        report.dist_opt_max = std::max(report.dist_opt_max, d.optimal);
    };
    report.distance_coverage = coverage.mode;
    if (coverage.mode == CoverageMode::exhaustive) {
        for (std::uint64_t p = 0; p < (std::uint64_t{1} << n); ++p) {
            for (std::uint64_t q = 0; q < (std::uint64_t{1} << n); ++q) {
                record(BitString(n, p), BitString(n, q));
            }
        }
    } else {
        record(BitString::zeros(n), BitString::zeros(n));
        std::mt19937_64 rng(coverage.seed ^ 0x9e3779b97f4a7c15ULL);
        std::uniform_int_distribution<std::uint64_t> draw(0, (std::uint64_t{1} << n) - 1);
        for (std::size_t i = 1; i < options.distance_samples; ++i) {
            BitString p(n, draw(rng));
            BitString q(n, draw(rng));
            record(p, q);
        }
    }

    double max_eps = report.measured.max_eps();
    if (options.general_conditions && max_eps > 0.0) {
        report.general_ratio = report.measured.general_anticommute_max / (nd * nd * max_eps);
    }
    if (report.epsilon > 0.0) {
        report.distance_ratio = report.dist_fixed_max / (std::pow(nd, 9.0 / 8.0) * std::pow(report.epsilon, 0.125));
    }
    return report;
}

}  // namespace pchsh
