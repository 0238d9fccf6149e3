// Acceptance suite: one PASS/FAIL line per criterion, exit status 0 iff all pass.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "pchsh/extraction.h"
#include "pchsh/game.h"
#include "pchsh/strategy.h"
#include "pchsh/verifier.h"
#include "test_util.h"

using namespace pchsh;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

struct Criterion {
    int id;
    const char *name;
    double time_limit_s;
    std::function<Outcome()> body;
};

std::string fmt(const char *format, double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, format, x);
    return buf;
}

double max_entry_diff(const Strategy &a, const Strategy &b) {
    double d = (a.state - b.state).cwiseAbs().maxCoeff();
    for (std::size_t q = 0; q < a.question_count(); ++q) {
        for (std::size_t k = 0; k < a.subtests(); ++k) {
            d = std::max(d, max_abs_diff(a.alice_obs[q][k], b.alice_obs[q][k]));
            d = std::max(d, max_abs_diff(a.bob_obs[q][k], b.bob_obs[q][k]));
        }
    }
    return d;
}

Outcome ideal_value() {
    double worst = 0.0;
    for (std::size_t n : {2, 4, 6}) {
        worst = std::max(worst, std::abs(exact_value(ideal_strategy(n)).value - kTsirelsonBound));
    }
    return {worst <= 1e-9, "max |value - 2sqrt2| = " + fmt("%.3g", worst)};
}

Outcome subtest_constancy() {
    Strategy s = ideal_strategy(4);
    double worst = 0.0;
    int checked = 0;
    for (std::uint64_t qa = 0; qa < 4; ++qa) {
        for (std::uint64_t qb = 0; qb < 4; ++qb) {
            for (std::size_t k = 0; k < 2; ++k) {
                double f = subtest_value(s, BitString(2, qa), BitString(2, qb), k);
                worst = std::max(worst, std::abs(f - kTsirelsonBound));
                ++checked;
            }
        }
    }
    return {worst <= 1e-9 && checked == 32, std::to_string(checked) + " values, max dev " + fmt("%.3g", worst)};
}

Outcome classical_baseline() {
    double worst = 0.0;
    for (std::size_t n : {2, 4, 6}) {
        Strategy s = fixtures::all_zero_strategy(n);
        worst = std::max(worst, std::abs(exact_value(s).value - 2.0));
        worst = std::max(worst, std::abs(fixtures::oracle_value(s) - 2.0));
    }
    return {worst <= 1e-12, "max |value - 2| = " + fmt("%.3g", worst)};
}

Outcome zero_error_self_test() {
    double eps = 0.0, general = 0.0, dist = 0.0;
    for (std::size_t n : {2, 4}) {
        Strategy s = ideal_strategy(n);
        ExtractedOperators ops = build_xz(s);
        ConditionNorms c = measure_general_conditions(s, ops, {CoverageMode::exhaustive}, measure_epsilons(s, ops));
        eps = std::max(eps, c.max_eps());
        general = std::max({general, c.general_anticommute_max, c.general_swap_max});
        ExtractionDistance d(s, ops);
        auto check = [&](const BitString &p, const BitString &q) {
            DistancePair pair = d(p, q);
            dist = std::max({dist, pair.fixed, pair.optimal});
        };
        if (n == 2) {
            for (std::uint64_t p = 0; p < 4; ++p) {
                for (std::uint64_t q = 0; q < 4; ++q) {
                    check(BitString(2, p), BitString(2, q));
                }
            }
        } else {
            std::mt19937 rng(4);
            std::uniform_int_distribution<std::uint64_t> draw(0, 15);
            for (int i = 0; i < 256; ++i) {
                check(BitString(4, draw(rng)), BitString(4, draw(rng)));
            }
        }
    }
    bool ok = eps <= 1e-8 && general <= 1e-7 && dist <= 1e-7;
    return {ok, "eps " + fmt("%.3g", eps) + ", general " + fmt("%.3g", general) + ", distance " + fmt("%.3g", dist)};
}

Outcome explicit_constants() {
    bool ok = true;
    double worst_margin = -1e300;
    for (double eta : {0.02, 0.05, 0.1}) {
        for (std::size_t n : {2, 4}) {
            Strategy s = noisy_strategy(n, {NoiseModel::bob_rotation, eta});
            double eps = kTsirelsonBound - exact_value(s).value;
            double delta = n * eps;
            double e1 = 32 * std::pow(delta * std::sqrt(2.0), 0.25);
            double e2 = 4 * std::pow(delta * std::sqrt(2.0), 0.25);
            double e3 = 4 * std::pow(delta * std::sqrt(2.0), 0.5);
            CertifyOptions opts;
            opts.general_conditions = false;
            SelfTestReport r = certify(s, opts);
            ok = ok && r.measured.eps1 <= e1 + 1e-9 && r.measured.eps2 <= e2 + 1e-9 && r.measured.eps3 <= e3 + 1e-9;
            worst_margin = std::max({worst_margin, r.measured.eps1 / e1, r.measured.eps2 / e2, r.measured.eps3 / e3});
        }
    }
    return {ok, "max measured/certified = " + fmt("%.3g", worst_margin)};
}

// Both sides of each inequality are sums over the same correlators in
// different orders; at n = 2 the per-subtest bound is an equality, so the
// comparison carries kGuaranteeSlack and the tightest margin is printed.
Outcome pigeonhole() {
    bool ok = true;
    int checks = 0;
    double tightest = 1e300;
    auto check = [&](double lhs, double rhs) {
        ok = ok && lhs >= rhs - kGuaranteeSlack;
        tightest = std::min(tightest, lhs - rhs);
        ++checks;
    };
    for (double eta : {0.02, 0.05, 0.1}) {
        for (std::size_t n : {2, 4}) {
            Strategy s = noisy_strategy(n, {NoiseModel::bob_rotation, eta});
            CanonicalForm c = canonicalize(s);
            double value = c.value_before;
            double eps = kTsirelsonBound - value;
            check(c.best_qb_average, value);
            QuestionSearchResult r = search_questions(c);
            for (double d : r.per_subtest_delta) {
                check((n / 2.0) * eps, d);
            }
            CorrelationTable t(c.strategy);
            BitString zero = BitString::zeros(n / 2);
            for (const auto &[kl, pq] : r.pair_questions) {
                for (std::size_t j : {kl.first, kl.second}) {
                    check(t.subtest(pq.question, zero, j), kTsirelsonBound - n * eps);
                }
            }
        }
    }
    return {ok, std::to_string(checks) + " inequalities, tightest margin " + fmt("%.3g", tightest)};
}

Outcome relabel_invariance() {
    std::mt19937 rng(2718);
    std::bernoulli_distribution coin(0.5);
    std::uniform_int_distribution<int> len(1, 8);
    double value_dev = 0.0, involution_dev = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        Strategy s = fixtures::random_strategy(2, rng);
        if (!validate(s).passed()) {
            return {false, "generated strategy failed validation"};
        }
        RelabelTranscript t;
        for (int i = len(rng); i > 0; --i) {
            t.push_back({coin(rng) ? Party::alice : Party::bob, 0});
        }
        value_dev = std::max(value_dev, std::abs(exact_value(apply_relabels(s, t)).value - exact_value(s).value));
        involution_dev = std::max(involution_dev, max_entry_diff(relabel_alice_bit(relabel_alice_bit(s, 0), 0), s));
        involution_dev = std::max(involution_dev, max_entry_diff(relabel_bob_bit(relabel_bob_bit(s, 0), 0), s));
    }
    return {value_dev <= 1e-9 && involution_dev <= 1e-12,
            "value dev " + fmt("%.3g", value_dev) + ", involution dev " + fmt("%.3g", involution_dev)};
}

Outcome referee_convergence() {
    Strategy s = ideal_strategy(2);
    int inside = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        GameValue v = referee_simulate(s, 100000, seed);
        inside += std::abs(v.value - kTsirelsonBound) <= 5 * v.standard_error;
    }
    GameValue a = referee_simulate(s, 100000, 42);
    GameValue b = referee_simulate(s, 100000, 42);
    bool same = a.value == b.value && a.standard_error == b.standard_error && a.win_probability == b.win_probability;
    return {inside >= 99 && same, std::to_string(inside) + "/100 within 5 stderr, repeat " + (same ? "identical" : "differs")};
}

Outcome scaling_trend() {
    const std::vector<double> etas{0.0, 1e-7, 0.01, 0.02, 0.05, 0.1, 0.2, 0.3};
    bool monotone = true, vanishing = true;
    std::printf("       n  eta        epsilon      dist_fixed   dist_opt     ratio\n");
    for (std::size_t n : {2, 4, 6}) {
        double last = -1.0;
        for (double eta : etas) {
            Strategy s = eta == 0.0 ? ideal_strategy(n) : noisy_strategy(n, {NoiseModel::bob_rotation, eta});
            CertifyOptions opts;
            opts.general_conditions = false;
            SelfTestReport r = certify(s, opts);
            std::printf("       %zu  %-9.3g  %-11.4g  %-11.4g  %-11.4g  %s\n", n, eta, r.epsilon, r.dist_fixed_max,
                        r.dist_opt_max, r.distance_ratio ? fmt("%.4g", *r.distance_ratio).c_str() : "-");
            monotone = monotone && r.dist_fixed_max >= last - 1e-12;
            last = r.dist_fixed_max;
            if (eta > 0.0 && eta <= 1e-7) {
                vanishing = vanishing && r.dist_fixed_max <= 1e-6;
            }
        }
    }
    return {monotone && vanishing, std::string("nondecreasing in eta: ") + (monotone ? "yes" : "no") +
                                       ", small-eta distance <= 1e-6: " + (vanishing ? "yes" : "no")};
}

Outcome log_separation() {
    for (std::size_t n = 2; n <= 64; n += 2) {
        std::size_t m = n / 2;
        std::vector<BitString> set = log_question_set(n);
        if (set.size() > static_cast<std::size_t>(std::ceil(std::log2(m + 1.0)))) {
            return {false, "set too large at n = " + std::to_string(n)};
        }
        for (std::size_t k = 0; k < m; ++k) {
            for (std::size_t l = k + 1; l < m; ++l) {
                bool separated = false;
                for (const BitString &q : set) {
                    separated = separated || q[k] != q[l];
                }
                if (!separated) {
                    return {false, "pair unseparated at n = " + std::to_string(n)};
                }
            }
        }
    }
    return {true, "n = 2..64"};
}

}  // namespace

int main() {
    const std::vector<Criterion> criteria{
        {1, "ideal value", 10, ideal_value},
        {2, "subtest constancy", 5, subtest_constancy},
        {3, "classical baseline", 1, classical_baseline},
        {4, "zero-error self-test", 120, zero_error_self_test},
        {5, "explicit-constant soundness", 120, explicit_constants},
        {6, "pigeonhole guarantees", 60, pigeonhole},
        {7, "relabel invariance", 60, relabel_invariance},
        {8, "referee convergence", 60, referee_convergence},
        {9, "scaling trend (reported)", 600, scaling_trend},
        {10, "log-question separation", 1, log_separation},
    };
    int failures = 0;
    for (const Criterion &c : criteria) {
        auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.body();
        } catch (const std::exception &e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        bool in_time = secs < c.time_limit_s;
        bool pass = o.pass && in_time;
        failures += !pass;
        std::printf("%s [%d] %s: %s (%.2f s, limit %.0f s%s)\n", pass ? "PASS" : "FAIL", c.id, c.name,
                    o.detail.c_str(), secs, c.time_limit_s, in_time ? "" : ", over time");
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
