#include "pchsh/report_io.h"

#include <cstdio>
#include <cstdlib>
#include <stdexcept>

#include "json.hpp"

namespace pchsh {

namespace {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

// Rounds to 12 significant digits; the shortest representation nlohmann
// prints for the rounded double has at most that many digits.
double rounded(double x) { return std::strtod(format_significant(x, 12).c_str(), nullptr); }

ordered_json optional_number(const std::optional<double> &x) {
    return x ? ordered_json(rounded(*x)) : ordered_json(nullptr);
}

const char *party_name(Party p) { return p == Party::alice ? "alice" : "bob"; }

ordered_json transcript_json(const RelabelTranscript &transcript) {
    ordered_json out = ordered_json::array();
    for (const auto &step : transcript) {
        out.push_back({{"party", party_name(step.party)}, {"bit", step.bit}});
    }
    return out;
}

}  // namespace

std::string format_significant(double x, int digits) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.*g", digits, x);
    return buf;
}

std::string transcript_to_json(const RelabelTranscript &transcript) { return transcript_json(transcript).dump(); }

RelabelTranscript transcript_from_json(std::string_view text) {
    try {
        json doc = json::parse(text);
        RelabelTranscript out;
        for (const auto &step : doc) {
            std::string party = step.at("party").get<std::string>();
            if (party != "alice" && party != "bob") {
                throw std::invalid_argument("transcript party must be alice or bob");
            }
            out.push_back({party == "alice" ? Party::alice : Party::bob, step.at("bit").get<std::size_t>()});
        }
        return out;
    } catch (const json::exception &e) {
        throw std::invalid_argument(std::string("malformed relabel transcript: ") + e.what());
    }
}

std::string report_to_json(const SelfTestReport &r, int indent) {
    ordered_json doc;
    doc["n"] = r.n;
    doc["value"] = rounded(r.value);
    doc["epsilon"] = rounded(r.epsilon);
    doc["delta_cert"] = rounded(r.delta_cert);

    ordered_json canon;
    canon["transcript"] = transcript_json(r.transcript);
    canon["q_b_star"] = r.questions.q_b_star.to_string();
    canon["q_a_star"] = r.questions.q_a_star.to_string();
    canon["best_qb_average"] = rounded(r.best_qb_average);
    canon["value_after"] = rounded(r.value_after_canonicalization);
    doc["canonicalization"] = canon;

    ordered_json deltas = ordered_json::array();
    for (double d : r.questions.per_subtest_delta) {
        deltas.push_back(rounded(d));
    }
    doc["delta_per_subtest"] = deltas;

    ordered_json pairs = ordered_json::array();
    for (const auto &[key, pq] : r.questions.pair_questions) {
        pairs.push_back({{"k", key.first},
                         {"l", key.second},
                         {"q_a", pq.question.to_string()},
                         {"min_f", rounded(pq.min_subtest_value)}});
    }
    doc["pair_questions"] = pairs;

    doc["certified"] = {{"eps1", rounded(r.certified.eps1)},
                        {"eps2", rounded(r.certified.eps2)},
                        {"eps3", rounded(r.certified.eps3)}};
    ordered_json measured;
    measured["eps1"] = rounded(r.measured.eps1);
    measured["eps2"] = rounded(r.measured.eps2);
    measured["eps3"] = rounded(r.measured.eps3);
    measured["general_anticommute_max"] = rounded(r.measured.general_anticommute_max);
    measured["general_swap_max"] = rounded(r.measured.general_swap_max);
    ordered_json coverage;
    coverage["mode"] = r.measured.coverage.mode == CoverageMode::exhaustive ? "exhaustive" : "sampled";
    if (r.measured.coverage.mode == CoverageMode::sampled) {
        coverage["count"] = r.measured.coverage.samples;
        coverage["seed"] = r.measured.coverage.seed;
    }
    coverage["pairs_checked"] = r.measured.pairs_checked;
    measured["coverage"] = coverage;
    doc["measured"] = measured;

    doc["operators"] = {{"hermiticity", rounded(r.operators.hermiticity)},
                        {"unitarity", rounded(r.operators.unitarity)},
                        {"alice_commutation", rounded(r.operators.alice_commutation)}};

    doc["junk_norm"] = rounded(r.junk_norm);
    doc["dist_fixed_max"] = rounded(r.dist_fixed_max);
    doc["dist_opt_max"] = rounded(r.dist_opt_max);
    doc["distance_coverage"] = r.distance_coverage == CoverageMode::exhaustive ? "exhaustive" : "sampled";
    ordered_json distances = ordered_json::array();
    for (const auto &d : r.distances) {
        distances.push_back(
            {{"p", d.p.to_string()}, {"q", d.q.to_string()}, {"fixed", rounded(d.fixed)}, {"optimal", rounded(d.optimal)}});
    }
    doc["distances"] = distances;
    doc["trend"] = {{"general_ratio", optional_number(r.general_ratio)},
                    {"distance_ratio", optional_number(r.distance_ratio)}};

    doc["pass"] = {{"eps1", r.eps1_pass},
                   {"eps2", r.eps2_pass},
                   {"eps3", r.eps3_pass},
                   {"qb_guarantee", r.qb_guarantee},
                   {"subtest_guarantee", r.subtest_guarantee},
                   {"pair_guarantee", r.pair_guarantee},
                   {"operators_valid", r.operators_valid},
                   {"all", r.all_passed()}};
    doc["violations"] = r.violations;
    return doc.dump(indent) + "\n";
}

std::string sweep_csv_header() {
    return "n,model,param,value,epsilon,delta_cert,eps1_meas,eps1_cert,eps2_meas,eps2_cert,eps3_meas,eps3_cert,"
           "dist_fixed_max,dist_opt_max,junk_norm";
}

std::string sweep_csv_row(const SelfTestReport &r, const NoiseSpec &noise) {
    std::string row = std::to_string(r.n) + "," + to_string(noise.model);
    for (double x : {noise.param, r.value, r.epsilon, r.delta_cert, r.measured.eps1, r.certified.eps1,
                     r.measured.eps2, r.certified.eps2, r.measured.eps3, r.certified.eps3, r.dist_fixed_max,
                     r.dist_opt_max, r.junk_norm}) {
        row += ",";
        row += format_significant(x, 12);
    }
    return row;
}

}  // namespace pchsh
