// Copyright 2026 The nulllab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef NULLLAB_IO_HPP
#define NULLLAB_IO_HPP

// Machine-readable output: frequency tables as JSON or CSV, record dumps as
// CSV, states as {"labels": [...], "amplitudes": [[re, im], ...]}.

#include <charconv>
#include <cmath>
#include <nlohmann/json.hpp>
#include <span>
#include <sstream>
#include <string>

#include "nulllab/engine.hpp"
#include "nulllab/qstate.hpp"
#include "nulllab/scenarios.hpp"

namespace nulllab {

/// Shortest representation that parses back to the same double.
inline std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return {buf, res.ptr};
}

inline std::string csv_field(const std::string &s) {
    if (s.find_first_of(",\"\n") == std::string::npos) {
        return s;
    }
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') {
            out += '"';
        }
        out += c;
    }
    return out + "\"";
}

inline nlohmann::ordered_json state_to_json(const StateVector &psi) {
    nlohmann::ordered_json j;
    j["labels"] = psi.space()->labels();
    auto amps = nlohmann::ordered_json::array();
    for (std::size_t n = 0; n < psi.dim(); ++n) {
        amps.push_back({psi[n].real(), psi[n].imag()});
    }
    j["amplitudes"] = std::move(amps);
    return j;
}

inline StateVector state_from_json(const nlohmann::json &j) {
    auto space = HilbertSpace::make(j.at("labels").get<std::vector<std::string>>());
    std::vector<Complex> amps;
    for (const auto &a : j.at("amplitudes")) {
        amps.emplace_back(a.at(0).get<double>(), a.at(1).get<double>());
    }
    return {std::move(space), amps};
}

inline nlohmann::ordered_json table_to_json(const FrequencyTable &table) {
    nlohmann::ordered_json j;
    j["scenario"] = table.scenario;
    j["seed"] = table.master_seed;
    j["trials"] = table.total_trials;
    auto classes = nlohmann::ordered_json::array();
    for (const auto &row : table.rows) {
        nlohmann::ordered_json c;
        c["name"] = row.name;
        c["count"] = row.count;
        c["freq"] = row.frequency;
        c["exact"] = row.exact;
        if (std::isfinite(row.z_score)) {
            c["z"] = row.z_score;
        } else {
            c["z"] = nullptr;
        }
        classes.push_back(std::move(c));
    }
    j["classes"] = std::move(classes);
    return j;
}

inline std::string table_to_csv(const FrequencyTable &table) {
    std::string out = "class,count,freq,exact,z\n";
    for (const auto &row : table.rows) {
        out += csv_field(row.name) + "," + std::to_string(row.count) + "," + format_double(row.frequency) + "," +
               format_double(row.exact) + "," + format_double(row.z_score) + "\n";
    }
    return out;
}

/// time:detector:label entries joined by ';'; a silent detector reports label "null".
inline std::string format_events(const std::vector<Event> &events) {
    std::string out;
    for (const auto &e : events) {
        if (!out.empty()) {
            out += ';';
        }
        out += format_double(e.time) + ":" + e.detector + ":" + e.label.value_or("null");
    }
    return out;
}

inline std::string records_csv_header() { return "index,seed,classification,events\n"; }

inline std::string records_to_csv(std::span<const TrialRecord> records) {
    std::string out;
    for (const auto &r : records) {
        out += std::to_string(r.index) + "," + std::to_string(r.derived_seed) + "," + csv_field(r.outcome.classification) +
               "," + csv_field(format_events(r.outcome.events)) + "\n";
    }
    return out;
}

inline nlohmann::ordered_json distribution_to_json(const Scenario &scenario) {
    nlohmann::ordered_json j;
    j["scenario"] = scenario.name();
    auto classes = nlohmann::ordered_json::array();
    for (const auto &[name, p] : exact_distribution(scenario)) {
        classes.push_back({{"name", name}, {"exact", p}});
    }
    j["classes"] = std::move(classes);
    if (const auto &decay = scenario.decay()) {
        j["decay"] = {{"lifetime", decay->lifetime}, {"cutoff", decay->cutoff}, {"survival", decay->survival()}};
    }
    auto leaves = nlohmann::ordered_json::array();
    for (const auto &leaf : scenario.classified_leaves()) {
        nlohmann::ordered_json l;
        auto seq = nlohmann::ordered_json::array();
        for (const auto &r : leaf.leaf.results) {
            nlohmann::ordered_json label = r.label ? nlohmann::ordered_json(*r.label) : nlohmann::ordered_json(nullptr);
            seq.push_back({{"detector", r.detector}, {"label", std::move(label)}});
        }
        l["events"] = std::move(seq);
        l["classification"] = leaf.classification;
        l["probability"] = leaf.leaf.probability;
        l["state"] = state_to_json(leaf.leaf.final_state);
        leaves.push_back(std::move(l));
    }
    j["leaves"] = std::move(leaves);
    return j;
}

}  // namespace nulllab

#endif  // NULLLAB_IO_HPP
