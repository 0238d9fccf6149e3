#include "pchsh/strategy_io.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace pchsh {

namespace {

using nlohmann::json;

void write_double(std::string &out, double x) {
    if (!std::isfinite(x)) {
        throw std::invalid_argument("cannot serialize a non-finite amplitude");
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    out += buf;
}

void write_complex(std::string &out, Complex c) {
    out += '[';
    write_double(out, c.real());
    out += ", ";
    write_double(out, c.imag());
    out += ']';
}

void write_matrix(std::string &out, const ComplexMatrix &m) {
    out += '[';
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (i != 0 || j != 0) {
                out += ", ";
            }
            write_complex(out, m(i, j));
        }
    }
    out += ']';
}

void write_table(std::string &out, const std::vector<std::vector<ComplexMatrix>> &table, std::size_t subtests) {
    out += "{";
    for (std::size_t q = 0; q < table.size(); ++q) {
        out += q == 0 ? "\n    \"" : ",\n    \"";
        out += BitString(subtests, q).to_string();
        out += "\": [";
        for (std::size_t k = 0; k < table[q].size(); ++k) {
            out += k == 0 ? "\n      " : ",\n      ";
            write_matrix(out, table[q][k]);
        }
        out += "\n    ]";
    }
    out += "\n  }";
}

Complex read_complex(const json &j) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
        throw std::invalid_argument("complex numbers must be [re, im] pairs");
    }
    return {j[0].get<double>(), j[1].get<double>()};
}

ComplexMatrix read_matrix(const json &j, Eigen::Index dim) {
    if (!j.is_array() || j.size() != static_cast<std::size_t>(dim * dim)) {
        throw std::invalid_argument("observable matrix must have dim*dim entries");
    }
    ComplexMatrix m(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        for (Eigen::Index c = 0; c < dim; ++c) {
            m(i, c) = read_complex(j[static_cast<std::size_t>(i * dim + c)]);
        }
    }
    return m;
}

std::vector<std::vector<ComplexMatrix>> read_table(const json &j, std::size_t subtests, Eigen::Index dim,
                                                   const char *name) {
    if (!j.is_object()) {
        throw std::invalid_argument(std::string(name) + " must be an object keyed by question");
    }
    std::size_t questions = std::size_t{1} << subtests;
    std::vector<std::vector<ComplexMatrix>> table(questions);
    std::vector<bool> seen(questions, false);
    for (const auto &[key, family] : j.items()) {
        BitString q = BitString::from_string(key);
        if (q.size() != subtests) {
            throw std::invalid_argument(std::string(name) + " question '" + key + "' has the wrong length");
        }
        if (!family.is_array()) {
            throw std::invalid_argument(std::string(name) + " question '" + key + "' must map to a list");
        }
        seen[q.value()] = true;
        for (const auto &m : family) {
            table[q.value()].push_back(read_matrix(m, dim));
        }
    }
    for (std::size_t q = 0; q < questions; ++q) {
        if (!seen[q]) {
            throw std::invalid_argument(std::string(name) + " is missing question " + BitString(subtests, q).to_string());
        }
    }
    return table;
}

}  // namespace

std::string strategy_to_json(const Strategy &strategy) {
    std::string out = "{\n";
    out += "  \"n\": " + std::to_string(strategy.n) + ",\n";
    out += "  \"dim_A\": " + std::to_string(strategy.shape.dim_a) + ",\n";
    out += "  \"dim_B\": " + std::to_string(strategy.shape.dim_b) + ",\n";
    out += "  \"state\": [";
    for (Eigen::Index i = 0; i < strategy.state.size(); ++i) {
        out += i == 0 ? "" : ", ";
        write_complex(out, strategy.state[i]);
    }
    out += "],\n  \"alice_obs\": ";
    write_table(out, strategy.alice_obs, strategy.subtests());
    out += ",\n  \"bob_obs\": ";
    write_table(out, strategy.bob_obs, strategy.subtests());
    out += "\n}\n";
    return out;
}

Strategy strategy_from_json(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error &e) {
        throw std::invalid_argument(std::string("strategy file is not valid JSON: ") + e.what());
    }
    try {
        Strategy s;
        s.n = doc.at("n").get<std::size_t>();
        if (s.n < 2 || s.n % 2 != 0 || s.n > kMaxStrategyN) {
            throw std::invalid_argument("strategy n must be even and in [2, " + std::to_string(kMaxStrategyN) + "]");
        }
        s.shape.dim_a = doc.at("dim_A").get<Eigen::Index>();
        s.shape.dim_b = doc.at("dim_B").get<Eigen::Index>();
        if (s.shape.dim_a < 1 || s.shape.dim_b < 1) {
            throw std::invalid_argument("dim_A and dim_B must be positive");
        }
        const json &state = doc.at("state");
        if (!state.is_array() || state.size() != static_cast<std::size_t>(s.shape.total())) {
            throw std::invalid_argument("state must list dim_A * dim_B amplitudes");
        }
        s.state.resize(s.shape.total());
        for (std::size_t i = 0; i < state.size(); ++i) {
            s.state[static_cast<Eigen::Index>(i)] = read_complex(state[i]);
        }
        s.alice_obs = read_table(doc.at("alice_obs"), s.subtests(), s.shape.dim_a, "alice_obs");
        s.bob_obs = read_table(doc.at("bob_obs"), s.subtests(), s.shape.dim_b, "bob_obs");
        return s;
    } catch (const json::exception &e) {
        throw std::invalid_argument(std::string("malformed strategy document: ") + e.what());
    }
}

void save_strategy(const Strategy &strategy, const std::filesystem::path &path) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    }
    out << strategy_to_json(strategy);
}

Strategy load_strategy(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw std::invalid_argument("cannot open strategy file " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return strategy_from_json(buf.str());
}

}  // namespace pchsh
