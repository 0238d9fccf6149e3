#include "pchsh/strategy.h"

#include <array>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace pchsh {

namespace {

void require_even_n(std::size_t n) {
    if (n < 2 || n % 2 != 0) {
        throw std::invalid_argument("n must be even and at least 2, got " + std::to_string(n));
    }
    if (n > kMaxStrategyN) {
        throw std::invalid_argument("n is too large for a dense strategy");
    }
}

// `single` acting on qubit `k` of an m-qubit register (qubit 0 is the most significant).
ComplexMatrix embed(const ComplexMatrix &single, std::size_t k, std::size_t m) {
    ComplexMatrix left = identity(Eigen::Index{1} << k);
    ComplexMatrix right = identity(Eigen::Index{1} << (m - k - 1));
    return tensor(tensor(left, single), right);
}

// Product of identical two-qubit pair states; pair[2 * x + y] is the amplitude of |x>_A |y>_B.
StateVector product_of_pairs(const std::array<Complex, 4> &pair, std::size_t m) {
    Eigen::Index dim = Eigen::Index{1} << m;
    StateVector state(dim * dim);
    for (Eigen::Index a = 0; a < dim; ++a) {
        for (Eigen::Index b = 0; b < dim; ++b) {
            Complex amp = 1.0;
            for (std::size_t k = 0; k < m; ++k) {
                int xa = static_cast<int>((a >> (m - 1 - k)) & 1);
                int xb = static_cast<int>((b >> (m - 1 - k)) & 1);
                amp *= pair[2 * xa + xb];
            }
            state[a * dim + b] = amp;
        }
    }
    return state;
}

Strategy per_pair_strategy(std::size_t n, const std::array<Complex, 4> &pair, const ComplexMatrix &a0,
                           const ComplexMatrix &a1, const ComplexMatrix &b0, const ComplexMatrix &b1) {
    require_even_n(n);
    std::size_t m = n / 2;
    Eigen::Index dim = Eigen::Index{1} << m;

    Strategy s;
    s.n = n;
    s.shape = {dim, dim};
    s.state = product_of_pairs(pair, m);

    std::vector<std::array<ComplexMatrix, 2>> alice_local(m), bob_local(m);
    for (std::size_t k = 0; k < m; ++k) {
        alice_local[k] = {embed(a0, k, m), embed(a1, k, m)};
        bob_local[k] = {embed(b0, k, m), embed(b1, k, m)};
    }
    std::size_t questions = s.question_count();
    s.alice_obs.resize(questions);
    s.bob_obs.resize(questions);
    for (std::size_t q = 0; q < questions; ++q) {
        BitString question(m, q);
        for (std::size_t k = 0; k < m; ++k) {
            s.alice_obs[q].push_back(alice_local[k][question[k]]);
            s.bob_obs[q].push_back(bob_local[k][question[k]]);
        }
    }
    return s;
}

const ComplexMatrix &lookup(const std::vector<std::vector<ComplexMatrix>> &table, std::size_t subtests,
                            const BitString &question, std::size_t k) {
    if (question.size() != subtests) {
        throw std::invalid_argument("question length " + std::to_string(question.size()) + " does not match n/2 = " +
                                    std::to_string(subtests));
    }
    if (k >= subtests) {
        throw std::out_of_range("subtest index out of range");
    }
    if (question.value() >= table.size() || table[question.value()].size() != subtests) {
        throw std::invalid_argument("missing observables for question " + question.to_string());
    }
    return table[question.value()][k];
}

}  // namespace

const ComplexMatrix &Strategy::alice(const BitString &question, std::size_t k) const {
    return lookup(alice_obs, subtests(), question, k);
}

const ComplexMatrix &Strategy::bob(const BitString &question, std::size_t k) const {
    return lookup(bob_obs, subtests(), question, k);
}

const ComplexMatrix &Strategy::observable(Party party, const BitString &question, std::size_t k) const {
    return party == Party::alice ? alice(question, k) : bob(question, k);
}

NoiseModel parse_noise_model(std::string_view name) {
    if (name == "none") return NoiseModel::none;
    if (name == "bob-rotation") return NoiseModel::bob_rotation;
    if (name == "partial-entanglement") return NoiseModel::partial_entanglement;
    throw std::invalid_argument("unknown noise model: " + std::string(name));
}

std::string to_string(NoiseModel model) {
    switch (model) {
        case NoiseModel::none:
            return "none";
        case NoiseModel::bob_rotation:
            return "bob-rotation";
        case NoiseModel::partial_entanglement:
            return "partial-entanglement";
    }
    return "unknown";
}

Strategy ideal_strategy(std::size_t n) { return noisy_strategy(n, NoiseSpec{}); }

Strategy noisy_strategy(std::size_t n, const NoiseSpec &noise) {
    if (!std::isfinite(noise.param)) {
        throw std::invalid_argument("noise parameter must be finite");
    }
    const double r = 1.0 / std::numbers::sqrt2;
    ComplexMatrix x = pauli_x();
    ComplexMatrix z = pauli_z();
    ComplexMatrix b0 = r * (z + x);
    ComplexMatrix b1 = r * (z - x);
    std::array<Complex, 4> pair = {0.5, 0.5, 0.5, -0.5};

    switch (noise.model) {
        case NoiseModel::none:
            if (noise.param != 0.0) {
                throw std::invalid_argument("noise model 'none' takes no parameter");
            }
            break;
        case NoiseModel::bob_rotation: {
            double half = noise.param / 2;
            ComplexMatrix rot = std::cos(half) * identity(2) - Complex(0, std::sin(half)) * pauli_y();
            b0 = rot * b0 * rot.adjoint();
            b1 = rot * b1 * rot.adjoint();
            break;
        }
        case NoiseModel::partial_entanglement: {
            double theta = noise.param;
            if (!(theta > 0.0) || theta > std::numbers::pi / 4 + 1e-15) {
                throw std::invalid_argument("partial-entanglement angle must lie in (0, pi/4]");
            }
            double c = std::cos(theta) * r;
            double s = std::sin(theta) * r;
            pair = {c, c, s, -s};
            break;
        }
    }
    return per_pair_strategy(n, pair, x, z, b0, b1);
}

bool ValidationReport::passed() const {
    return problems.empty() && hermiticity <= kValidationTol && unitarity <= kValidationTol &&
           commutation <= kValidationTol && normalization <= kValidationTol;
}

ValidationReport validate(const Strategy &strategy) {
    ValidationReport report;
    if (strategy.n < 2 || strategy.n % 2 != 0 || strategy.n > kMaxStrategyN) {
        report.problems.push_back("n must be even, at least 2 and at most " + std::to_string(kMaxStrategyN));
        return report;
    }
    if (strategy.shape.dim_a < 1 || strategy.shape.dim_b < 1) {
        report.problems.push_back("party dimensions must be positive");
        return report;
    }
    if (strategy.state.size() != strategy.shape.total()) {
        report.problems.push_back("state length does not equal dim_A * dim_B");
    } else {
        report.normalization = std::abs(strategy.state.norm() - 1.0);
    }

    auto check_party = [&](const std::vector<std::vector<ComplexMatrix>> &table, Eigen::Index dim,
                           const char *name) {
        if (table.size() != strategy.question_count()) {
            report.problems.push_back(std::string(name) + " observable table does not cover every question");
            return;
        }
        for (std::size_t q = 0; q < table.size(); ++q) {
            const auto &family = table[q];
            std::string where = std::string(name) + " question " + BitString(strategy.subtests(), q).to_string();
            if (family.size() != strategy.subtests()) {
                report.problems.push_back(where + " does not have n/2 observables");
                continue;
            }
            bool shapes_ok = true;
            for (const auto &m : family) {
                if (m.rows() != dim || m.cols() != dim) {
                    report.problems.push_back(where + " has an observable of the wrong dimension");
                    shapes_ok = false;
                    break;
                }
            }
            if (!shapes_ok) {
                continue;
            }
            for (std::size_t k = 0; k < family.size(); ++k) {
                report.hermiticity = std::max(report.hermiticity, hermiticity_residual(family[k]));
                report.unitarity = std::max(report.unitarity, unitarity_residual(family[k]));
                for (std::size_t l = k + 1; l < family.size(); ++l) {
                    report.commutation = std::max(report.commutation, commutator_residual(family[k], family[l]));
                }
            }
        }
    };
    check_party(strategy.alice_obs, strategy.shape.dim_a, "alice");
    check_party(strategy.bob_obs, strategy.shape.dim_b, "bob");
    return report;
}

void require_valid(const Strategy &strategy) {
    ValidationReport report = validate(strategy);
    if (report.passed()) {
        return;
    }
    std::ostringstream msg;
    msg << "strategy failed validation:";
    for (const auto &p : report.problems) {
        msg << " " << p << ";";
    }
    msg << " hermiticity=" << report.hermiticity << " unitarity=" << report.unitarity
        << " commutation=" << report.commutation << " normalization=" << report.normalization;
    throw std::invalid_argument(msg.str());
}

ComplexMatrix joint_projector(const Strategy &strategy, Party party, const BitString &question,
                              const BitString &answer) {
    if (answer.size() != strategy.subtests()) {
        throw std::invalid_argument("answer length does not match n/2");
    }
    std::vector<const ComplexMatrix *> family;
    for (std::size_t k = 0; k < strategy.subtests(); ++k) {
        family.push_back(&strategy.observable(party, question, k));
    }
    for (std::size_t k = 0; k < family.size(); ++k) {
        for (std::size_t l = k + 1; l < family.size(); ++l) {
            if (commutator_residual(*family[k], *family[l]) > kValidationTol) {
                throw std::invalid_argument("observables of question " + question.to_string() + " do not commute");
            }
        }
    }
    Eigen::Index dim = family[0]->rows();
    ComplexMatrix out = identity(dim);
    for (std::size_t k = 0; k < family.size(); ++k) {
        double sign = answer[k] ? -1.0 : 1.0;
        out = out * (0.5 * (identity(dim) + sign * *family[k]));
    }
    return out;
}

AnswerSampler::AnswerSampler(const Strategy &strategy) : strategy_(strategy) {}

bool AnswerSampler::measure_bit(Party party, const ComplexMatrix &observable, std::mt19937_64 &rng) {
    StateVector flipped = party == Party::alice ? apply_alice(observable, current_, strategy_.shape)
                                                : apply_bob(observable, current_, strategy_.shape);
    StateVector zero_branch = 0.5 * (current_ + flipped);
    double total = current_.squaredNorm();
    double p_zero = total > 0 ? zero_branch.squaredNorm() / total : 1.0;
    if (uniform_(rng) < p_zero) {
        current_ = std::move(zero_branch);
        return false;
    }
    current_ = 0.5 * (current_ - flipped);
    return true;
}

AnswerPair AnswerSampler::sample(const BitString &q_alice, const BitString &q_bob, std::mt19937_64 &rng) {
    std::size_t m = strategy_.subtests();
    current_ = strategy_.state;
    AnswerPair out{BitString::zeros(m), BitString::zeros(m)};
    for (std::size_t k = 0; k < m; ++k) {
        if (measure_bit(Party::alice, strategy_.alice(q_alice, k), rng)) {
            out.alice = out.alice.with_bit(k, true);
        }
    }
    for (std::size_t k = 0; k < m; ++k) {
        if (measure_bit(Party::bob, strategy_.bob(q_bob, k), rng)) {
            out.bob = out.bob.with_bit(k, true);
        }
    }
    return out;
}

AnswerPair sample_answers(const Strategy &strategy, const BitString &q_alice, const BitString &q_bob,
                          std::mt19937_64 &rng) {
    AnswerSampler sampler(strategy);
    return sampler.sample(q_alice, q_bob, rng);
}

}  // namespace pchsh
