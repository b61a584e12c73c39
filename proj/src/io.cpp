// Copyright 2026 The fastgate Authors
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


#include "fastgate/io.hpp"

#include <fstream>
#include <sstream>

#include "fastgate/errors.hpp"

namespace fastgate {

namespace {

const Json &field(const Json &j, const char *key) {
    if (!j.is_object() || !j.contains(key)) {
        throw ConfigError(std::string("json: missing field '") + key + "'");
    }
    return j.at(key);
}

template <class T>
T get(const Json &j, const char *key) {
    try {
        return field(j, key).get<T>();
    } catch (const nlohmann::json::exception &e) {
        throw ConfigError(std::string("json: field '") + key + "' has the wrong type: " + e.what());
    }
}

Json targets_json(IonPair t) { return Json::array({t.first, t.second}); }

IonPair targets_from(const Json &j) {
    const auto v = get<std::vector<int>>(j, "targets");
    if (v.size() != 2) {
        throw ConfigError("json: 'targets' must hold two ion indices");
    }
    return {v[0], v[1]};
}

}  // namespace

Json to_json(const TrapConfig &config) {
    Json j;
    j["num_ions"] = config.num_ions;
    j["ion_mass_kg"] = config.ion_mass;
    j["laser_wavelength_m"] = config.laser_wavelength;
    j["radial_frequency_rad_s"] = config.radial_frequency;
    j["axial_frequency_override_rad_s"] =
        config.axial_frequency_override ? Json(*config.axial_frequency_override) : Json(nullptr);
    j["quartic_coefficient_j_m4"] = config.quartic_coefficient ? Json(*config.quartic_coefficient) : Json(nullptr);
    return j;
}

TrapConfig trap_from_json(const Json &j) {
    TrapConfig c;
    c.num_ions = get<int>(j, "num_ions");
    c.ion_mass = get<double>(j, "ion_mass_kg");
    c.laser_wavelength = get<double>(j, "laser_wavelength_m");
    c.radial_frequency = get<double>(j, "radial_frequency_rad_s");
    if (!field(j, "axial_frequency_override_rad_s").is_null()) {
        c.axial_frequency_override = get<double>(j, "axial_frequency_override_rad_s");
    }
    if (!field(j, "quartic_coefficient_j_m4").is_null()) {
        c.quartic_coefficient = get<double>(j, "quartic_coefficient_j_m4");
    }
    c.validate();
    return c;
}

Json to_json(const ChainModel &chain) {
    Json j;
    j["trap"] = to_json(chain.config());
    j["positions_m"] = chain.positions();
    j["mode_freqs_rad_s"] = chain.mode_frequencies();
    Json rows = Json::array();
    for (int m = 0; m < chain.num_modes(); ++m) {
        std::vector<double> row(static_cast<std::size_t>(chain.num_ions()));
        for (int i = 0; i < chain.num_ions(); ++i) {
            row[i] = chain.coupling(m, i);
        }
        rows.push_back(row);
    }
    j["couplings"] = rows;
    j["lamb_dicke"] = chain.lamb_dicke();
    return j;
}

ChainModel chain_from_json(const Json &j) {
    const TrapConfig config = trap_from_json(field(j, "trap"));
    const auto rows = get<std::vector<std::vector<double>>>(j, "couplings");
    const int n = config.num_ions;
    if (static_cast<int>(rows.size()) != n) {
        throw ConfigError("json: couplings must be " + std::to_string(n) + " rows");
    }
    Eigen::MatrixXd b(n, n);
    for (int m = 0; m < n; ++m) {
        if (static_cast<int>(rows[m].size()) != n) {
            throw ConfigError("json: coupling row " + std::to_string(m) + " has the wrong length");
        }
        for (int i = 0; i < n; ++i) {
            b(m, i) = rows[m][i];
        }
    }
    return ChainModel::from_parts(config, get<std::vector<double>>(j, "positions_m"),
                                  get<std::vector<double>>(j, "mode_freqs_rad_s"), b,
                                  get<std::vector<double>>(j, "lamb_dicke"));
}

Json to_json(const PulseGroupSequence &sequence) {
    Json j;
    j["group_sizes"] = sequence.group_sizes;
    j["group_times_s"] = sequence.group_times;
    j["targets"] = targets_json(sequence.targets);
    j["gate_time_s"] = sequence.gate_time;
    return j;
}

PulseGroupSequence sequence_from_json(const Json &j) {
    PulseGroupSequence s;
    s.group_sizes = get<std::vector<int>>(j, "group_sizes");
    s.group_times = get<std::vector<double>>(j, "group_times_s");
    s.targets = targets_from(j);
    s.gate_time = get<double>(j, "gate_time_s");
    s.validate();
    return s;
}

Json to_json(const KickTrain &train) {
    Json j;
    j["rep_rate_hz"] = train.repetition_rate;
    j["targets"] = targets_json(train.targets);
    Json kicks = Json::array();
    for (const Kick &k : train.kicks) {
        Json e;
        e["t_s"] = k.time;
        e["sign"] = k.sign;
        kicks.push_back(e);
    }
    j["kicks"] = kicks;
    return j;
}

KickTrain train_from_json(const Json &j) {
    KickTrain t;
    t.repetition_rate = get<double>(j, "rep_rate_hz");
    t.targets = targets_from(j);
    const Json &kicks = field(j, "kicks");
    if (!kicks.is_array()) {
        throw ConfigError("json: 'kicks' must be a list");
    }
    for (const Json &k : kicks) {
        t.kicks.push_back({get<double>(k, "t_s"), get<int>(k, "sign")});
    }
    t.validate();
    return t;
}

Json to_json(const ThermalSpec &thermal) {
    Json j;
    switch (thermal.kind()) {
    case ThermalSpec::Kind::kUniform:
        j["nbar"] = thermal.uniform_nbar();
        break;
    case ThermalSpec::Kind::kPerMode:
        j["nbar_per_mode"] = thermal.per_mode_nbar();
        break;
    case ThermalSpec::Kind::kTemperature:
        j["temperature_k"] = thermal.temperature_kelvin();
        break;
    }
    return j;
}

ThermalSpec thermal_from_json(const Json &j) {
    if (!j.is_object() || j.size() != 1) {
        throw ConfigError("thermal: give exactly one of nbar, nbar_per_mode, temperature_k, rate_hz");
    }
    if (j.contains("nbar")) {
        return ThermalSpec::uniform(get<double>(j, "nbar"));
    }
    if (j.contains("nbar_per_mode")) {
        return ThermalSpec::occupations(get<std::vector<double>>(j, "nbar_per_mode"));
    }
    if (j.contains("temperature_k")) {
        return ThermalSpec::temperature(get<double>(j, "temperature_k"));
    }
    if (j.contains("rate_hz")) {
        return ThermalSpec::temperature(temperature_from_rate(get<double>(j, "rate_hz")));
    }
    throw ConfigError("thermal: unknown key '" + j.begin().key() + "'");
}

std::string to_string(PulseCounting counting) { return counting == PulseCounting::kPulses ? "pulses" : "sdks"; }

PulseCounting counting_from_string(const std::string &name) {
    if (name == "pulses") {
        return PulseCounting::kPulses;
    }
    if (name == "sdks") {
        return PulseCounting::kSdks;
    }
    throw ConfigError("pulse_counting must be 'pulses' or 'sdks', got '" + name + "'");
}

Json to_json(const GateReport &report) {
    Json j;
    j["dphi"] = report.phase_mismatch;
    j["entangling_phase"] = report.entangling_phase;
    Json modes = Json::array();
    for (const ModeResidual &m : report.per_mode) {
        Json e;
        e["omega"] = m.omega;
        e["dalpha_re"] = m.dalpha.real();
        e["dalpha_im"] = m.dalpha.imag();
        e["weight"] = m.weight;
        modes.push_back(e);
    }
    j["per_mode"] = modes;
    j["ideal_inf"] = report.ideal_infidelity;
    j["motional_inf"] = report.motional_infidelity;
    j["sdks"] = report.sdk_count;
    j["pulses"] = report.pulse_count;
    return j;
}

Json to_json(const Stage1Candidate &candidate) {
    Json j;
    j["sequence"] = to_json(candidate.sequence);
    j["analytic_ideal_inf"] = candidate.report.ideal_infidelity;
    j["selection_cost"] = candidate.selection_cost;
    j["scan_gate_time_s"] = candidate.scan_gate_time;
    j["bound"] = candidate.bound;
    return j;
}

Json to_json(const OptimizationResult &result, const ChainModel &chain) {
    Json j;
    j["schema_version"] = kSchemaVersion;
    j["chain"] = to_json(chain);
    j["sequence"] = to_json(result.sequence);
    j["train"] = to_json(result.train);
    j["thermal"] = to_json(result.thermal);
    j["epsilon"] = result.epsilon;
    j["pulse_counting"] = to_string(result.counting);
    j["report"] = to_json(result.report);
    j["adjusted_infidelity"] = result.adjusted_infidelity;
    j["seed_adjusted_infidelity"] = result.seed_adjusted_infidelity;
    j["seed_candidate"] = to_json(result.seed_candidate);
    Json t;
    t["stage1_evaluations"] = result.telemetry.stage1_evaluations;
    t["stage2_evaluations"] = result.telemetry.stage2_evaluations;
    t["bound_found"] = result.telemetry.bound_found;
    t["candidates_refined"] = result.telemetry.candidates_refined;
    j["telemetry"] = t;
    return j;
}

StoredResult stored_result_from_json(const Json &j) {
    const int version = get<int>(j, "schema_version");
    if (version != kSchemaVersion) {
        throw ConfigError("result: schema_version " + std::to_string(version) + " is not supported (expected " +
                          std::to_string(kSchemaVersion) + ")");
    }
    StoredResult r{chain_from_json(field(j, "chain")),
                   sequence_from_json(field(j, "sequence")),
                   train_from_json(field(j, "train")),
                   thermal_from_json(field(j, "thermal")),
                   get<double>(j, "epsilon"),
                   counting_from_string(get<std::string>(j, "pulse_counting")),
                   get<double>(field(j, "report"), "ideal_inf"),
                   get<double>(j, "adjusted_infidelity")};
    return r;
}

Json read_json_file(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open " + path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return Json::parse(buf.str());
    } catch (const nlohmann::json::parse_error &e) {
        throw ConfigError(path + ": invalid JSON: " + e.what());
    }
}

}  // namespace fastgate
