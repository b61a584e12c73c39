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


#include "fastgate/cli.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

#include "fastgate/errors.hpp"
#include "fastgate/stark_shift.hpp"

namespace fastgate {

namespace {

constexpr const char *kVersion = "0.1.0";

void check_keys(const Json &j, const std::set<std::string> &allowed, const std::string &where) {
    if (!j.is_object()) {
        throw ConfigError(where + ": expected an object");
    }
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!allowed.count(it.key())) {
            std::string list;
            for (const auto &k : allowed) {
                list += (list.empty() ? "" : ", ") + k;
            }
            throw ConfigError(where + ": unknown key '" + it.key() + "' (allowed: " + list + ")");
        }
    }
}

template <class T>
void read(const Json &j, const char *key, T &dst, const std::string &where) {
    if (!j.contains(key)) {
        return;
    }
    try {
        dst = j.at(key).get<T>();
    } catch (const nlohmann::json::exception &) {
        throw ConfigError(where + "." + key + ": wrong type");
    }
}

std::string fmt(double v, const char *spec = "%.17g") {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

std::vector<double> scan_from_json(const Json &j) {
    std::vector<double> us;
    if (j.is_array()) {
        try {
            us = j.get<std::vector<double>>();
        } catch (const nlohmann::json::exception &) {
            throw ConfigError("stage1.gate_time_scan_us: expected a list of numbers");
        }
    } else {
        check_keys(j, {"start", "stop", "step"}, "stage1.gate_time_scan_us");
        double start = 0.0, stop = 0.0, step = 0.0;
        read(j, "start", start, "stage1.gate_time_scan_us");
        read(j, "stop", stop, "stage1.gate_time_scan_us");
        read(j, "step", step, "stage1.gate_time_scan_us");
        if (!(step > 0.0) || !(stop >= start) || !(start > 0.0)) {
            throw ConfigError("stage1.gate_time_scan_us: need 0 < start <= stop and step > 0");
        }
        const long count = std::lround(std::floor((stop - start) / step + 1e-9)) + 1;
        for (long i = 0; i < count; ++i) {
            us.push_back(start + step * static_cast<double>(i));
        }
    }
    if (us.empty()) {
        throw ConfigError("stage1.gate_time_scan_us: scan is empty");
    }
    std::vector<double> s;
    for (double v : us) {
        s.push_back(us_to_s(v));
    }
    return s;
}

SweepSpec sweep_from_json(const Json &j) {
    check_keys(j, {"variable", "values", "start", "stop", "steps", "spacing"}, "sweep");
    SweepSpec s;
    read(j, "variable", s.variable, "sweep");
    static const std::set<std::string> known{"num_ions", "repetition_rate", "epsilon", "temperature", "jitter"};
    if (!known.count(s.variable)) {
        throw ConfigError("sweep.variable: unknown sweep variable '" + s.variable +
                          "' (expected num_ions, repetition_rate, epsilon, temperature or jitter)");
    }
    if (j.contains("values")) {
        read(j, "values", s.values, "sweep");
    } else {
        double start = 0.0, stop = 0.0;
        int steps = 0;
        std::string spacing = "linear";
        read(j, "start", start, "sweep");
        read(j, "stop", stop, "sweep");
        read(j, "steps", steps, "sweep");
        read(j, "spacing", spacing, "sweep");
        if (steps < 1) {
            throw ConfigError("sweep: give 'values' or start/stop with steps >= 1");
        }
        if (spacing != "linear" && spacing != "log") {
            throw ConfigError("sweep.spacing must be 'linear' or 'log'");
        }
        if (spacing == "log" && !(start > 0.0 && stop > 0.0)) {
            throw ConfigError("sweep: log spacing needs positive start and stop");
        }
        for (int i = 0; i < steps; ++i) {
            const double f = steps == 1 ? 0.0 : static_cast<double>(i) / (steps - 1);
            s.values.push_back(spacing == "log" ? start * std::pow(stop / start, f) : start + (stop - start) * f);
        }
    }
    if (s.values.empty()) {
        throw ConfigError("sweep: no sweep points");
    }
    return s;
}

Json provenance(const RunConfig &config, const std::string &command) {
    Json p;
    p["tool"] = "fastgate";
    p["version"] = kVersion;
    p["command"] = command;
    p["seed"] = config.seed;
    p["config"] = run_config_to_json(config);
    return p;
}

std::string provenance_line(const RunConfig &config, const std::string &command) {
    return "# fastgate " + std::string(kVersion) + " " + command + " seed=" + std::to_string(config.seed) +
           " config=" + run_config_to_json(config).dump();
}

std::filesystem::path prepare_out(const RunConfig &config) {
    const std::filesystem::path dir(config.out_dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw ConfigError("cannot create output directory " + config.out_dir + ": " + ec.message());
    }
    return dir;
}

void write_text(const std::filesystem::path &path, const std::string &text) {
    std::ofstream f(path);
    if (!f) {
        throw ConfigError("cannot write " + path.string());
    }
    f << text;
}

void write_json(const std::filesystem::path &path, const Json &j) { write_text(path, j.dump(2) + "\n"); }

ChainModel build_chain(const RunConfig &config) { return ChainModel::build(config.trap); }

std::string summary_text(const OptimizationResult &r, const ChainModel &chain) {
    std::ostringstream s;
    const GateReport &rep = r.report;
    s << "ions                " << chain.num_ions() << "\n";
    s << "targets             " << r.train.targets.first << ", " << r.train.targets.second << "\n";
    s << "repetition rate     " << fmt(r.train.repetition_rate * 1e-6, "%.6g") << " MHz\n";
    s << "gate time           " << fmt(s_to_us(r.sequence.gate_time), "%.6g") << " us\n";
    s << "SDKs                " << rep.sdk_count << " (" << rep.pulse_count << " counted for pulse errors)\n";
    s << "entangling phase    " << fmt(rep.entangling_phase, "%.10f") << " rad\n";
    s << "ideal infidelity    " << fmt(rep.ideal_infidelity, "%.6e") << "\n";
    s << "  phase part        " << fmt(rep.ideal_infidelity - rep.motional_infidelity, "%.6e") << "\n";
    s << "  motional part     " << fmt(rep.motional_infidelity, "%.6e") << "\n";
    s << "epsilon             " << fmt(r.epsilon, "%.3g") << "\n";
    s << "adjusted infidelity " << fmt(r.adjusted_infidelity, "%.6e") << "\n";
    s << "stage-1 seed        " << fmt(r.seed_adjusted_infidelity, "%.6e") << " (snapped to the grid)\n";
    s << "group sizes         ";
    for (int z : r.sequence.half_sizes()) {
        s << z << " ";
    }
    s << "\n\nmode  freq_MHz   |dalpha|      weight\n";
    for (std::size_t m = 0; m < rep.per_mode.size(); ++m) {
        const ModeResidual &mr = rep.per_mode[m];
        char line[128];
        std::snprintf(line, sizeof line, "%4zu  %8.4f  %.4e  %.4e\n", m, rad_s_to_mhz(mr.omega), std::abs(mr.dalpha),
                      mr.weight);
        s << line;
    }
    return s.str();
}

void write_trajectory(const std::filesystem::path &path, const OptimizationResult &r, const ChainModel &chain,
                      BasisState basis, const RunConfig &config) {
    const std::vector<Impulse> imp = impulses(r.train);
    const double t0 = imp.front().time;
    const double t1 = imp.back().time;
    const auto samples =
        sample_trajectory(imp, chain, r.train.targets, basis, t0, t1, std::max(2, config.trajectory_samples));
    std::ostringstream s;
    s << provenance_line(config, "optimize") << "\n";
    s << "time_s,mode,Q_m,V_m\n";
    for (const TrajectorySample &p : samples) {
        s << fmt(p.time) << "," << p.mode << "," << fmt(p.position) << "," << fmt(p.velocity) << "\n";
    }
    write_text(path, s.str());
}

}  // namespace

RunConfig parse_run_config(const Json &j) {
    check_keys(j, {"seed", "threads", "out_dir", "trap", "gate", "thermal", "stage1", "stage2", "sweep", "jitter",
                   "stark", "output"},
               "config");
    RunConfig c;
    read(j, "seed", c.seed, "config");
    read(j, "threads", c.threads, "config");
    read(j, "out_dir", c.out_dir, "config");

    if (j.contains("trap")) {
        const Json &t = j.at("trap");
        check_keys(t, {"num_ions", "radial_frequency_mhz", "axial_frequency_mhz", "quartic_coefficient_j_m4",
                       "ion_mass_amu", "laser_wavelength_nm"},
                   "trap");
        read(t, "num_ions", c.trap.num_ions, "trap");
        double radial = rad_s_to_mhz(c.trap.radial_frequency);
        read(t, "radial_frequency_mhz", radial, "trap");
        c.trap.radial_frequency = mhz_to_rad_s(radial);
        if (t.contains("axial_frequency_mhz") && !t.at("axial_frequency_mhz").is_null()) {
            double axial = 0.0;
            read(t, "axial_frequency_mhz", axial, "trap");
            c.trap.axial_frequency_override = mhz_to_rad_s(axial);
        }
        if (t.contains("quartic_coefficient_j_m4") && !t.at("quartic_coefficient_j_m4").is_null()) {
            double q = 0.0;
            read(t, "quartic_coefficient_j_m4", q, "trap");
            c.trap.quartic_coefficient = q;
        }
        double amu = c.trap.ion_mass / kConstants.atomic_mass_unit;
        read(t, "ion_mass_amu", amu, "trap");
        c.trap.ion_mass = amu * kConstants.atomic_mass_unit;
        double nm = c.trap.laser_wavelength * 1e9;
        read(t, "laser_wavelength_nm", nm, "trap");
        c.trap.laser_wavelength = nm_to_m(nm);
    }
    c.trap.validate();

    if (j.contains("gate")) {
        const Json &g = j.at("gate");
        check_keys(g, {"targets", "epsilon", "pulse_counting"}, "gate");
        if (g.contains("targets")) {
            std::vector<int> t;
            read(g, "targets", t, "gate");
            if (t.size() != 2) {
                throw ConfigError("gate.targets: expected two ion indices");
            }
            c.stage1.targets = {t[0], t[1]};
        }
        read(g, "epsilon", c.stage1.epsilon, "gate");
        if (g.contains("pulse_counting")) {
            std::string name;
            read(g, "pulse_counting", name, "gate");
            c.stage1.counting = counting_from_string(name);
        }
    }
    if (j.contains("thermal")) {
        c.stage1.thermal = thermal_from_json(j.at("thermal"));
    }
    if (j.contains("stage1")) {
        const Json &s = j.at("stage1");
        check_keys(s, {"group_count", "gate_time_scan_us", "z_bounds", "top_k", "restarts", "relaxed_starts",
                       "lattice_points", "exhaustive_threshold", "enumeration_budget", "max_sdks"},
                   "stage1");
        read(s, "group_count", c.stage1.group_count, "stage1");
        if (s.contains("gate_time_scan_us")) {
            c.stage1.gate_time_scan = scan_from_json(s.at("gate_time_scan_us"));
        }
        read(s, "z_bounds", c.stage1.z_bound_schedule, "stage1");
        read(s, "top_k", c.stage1.top_k, "stage1");
        read(s, "restarts", c.stage1.restarts, "stage1");
        read(s, "relaxed_starts", c.stage1.relaxed_starts, "stage1");
        read(s, "lattice_points", c.stage1.lattice_points, "stage1");
        read(s, "exhaustive_threshold", c.stage1.exhaustive_threshold, "stage1");
        read(s, "enumeration_budget", c.stage1.enumeration_budget, "stage1");
        read(s, "max_sdks", c.stage1.max_sdks, "stage1");
    }
    if (j.contains("stage2")) {
        const Json &s = j.at("stage2");
        check_keys(s, {"repetition_rate_mhz", "timing_variation", "restarts", "max_sweeps", "max_step", "combo_depth",
                       "exhaustive_limit"},
                   "stage2");
        double rate = c.stage2.repetition_rate * 1e-6;
        read(s, "repetition_rate_mhz", rate, "stage2");
        c.stage2.repetition_rate = rate * 1e6;
        read(s, "timing_variation", c.stage2.timing_variation, "stage2");
        read(s, "restarts", c.stage2.restarts, "stage2");
        read(s, "max_sweeps", c.stage2.max_sweeps, "stage2");
        read(s, "max_step", c.stage2.max_step, "stage2");
        read(s, "combo_depth", c.stage2.combo_depth, "stage2");
        read(s, "exhaustive_limit", c.stage2.exhaustive_limit, "stage2");
    }
    if (j.contains("sweep")) {
        c.sweep = sweep_from_json(j.at("sweep"));
    }
    if (j.contains("jitter")) {
        check_keys(j.at("jitter"), {"samples"}, "jitter");
        read(j.at("jitter"), "samples", c.jitter_samples, "jitter");
    }
    if (j.contains("stark")) {
        const Json &s = j.at("stark");
        check_keys(s, {"data", "rabi_frequency_rad_s", "pulse_pairs"}, "stark");
        read(s, "data", c.stark.data_path, "stark");
        if (s.contains("rabi_frequency_rad_s") && !s.at("rabi_frequency_rad_s").is_null()) {
            double w = 0.0;
            read(s, "rabi_frequency_rad_s", w, "stark");
            c.stark.rabi_frequency = w;
        }
        read(s, "pulse_pairs", c.stark.pulse_pairs, "stark");
    }
    if (j.contains("output")) {
        check_keys(j.at("output"), {"trajectory_samples"}, "output");
        read(j.at("output"), "trajectory_samples", c.trajectory_samples, "output");
    }

    if (c.threads < 1) {
        throw ConfigError("threads must be >= 1");
    }
    if (c.jitter_samples < 1 || c.trajectory_samples < 2) {
        throw ConfigError("jitter.samples must be >= 1 and output.trajectory_samples >= 2");
    }
    if (c.stark.pulse_pairs < 0) {
        throw ConfigError("stark.pulse_pairs must be non-negative");
    }
    c.stage1.seed = c.seed;
    c.stage2.seed = c.seed;
    c.stage1.threads = c.threads;
    c.stage2.validate();
    return c;
}

RunConfig load_run_config(const std::string &path) { return parse_run_config(read_json_file(path)); }

Json run_config_to_json(const RunConfig &c) {
    Json j;
    j["seed"] = c.seed;
    j["out_dir"] = c.out_dir;
    Json t;
    t["num_ions"] = c.trap.num_ions;
    t["radial_frequency_mhz"] = rad_s_to_mhz(c.trap.radial_frequency);
    t["axial_frequency_mhz"] =
        c.trap.axial_frequency_override ? Json(rad_s_to_mhz(*c.trap.axial_frequency_override)) : Json(nullptr);
    t["quartic_coefficient_j_m4"] = c.trap.quartic_coefficient ? Json(*c.trap.quartic_coefficient) : Json(nullptr);
    t["ion_mass_amu"] = c.trap.ion_mass / kConstants.atomic_mass_unit;
    t["laser_wavelength_nm"] = c.trap.laser_wavelength * 1e9;
    j["trap"] = t;
    Json g;
    g["targets"] = Json::array({c.stage1.targets.first, c.stage1.targets.second});
    g["epsilon"] = c.stage1.epsilon;
    g["pulse_counting"] = to_string(c.stage1.counting);
    j["gate"] = g;
    j["thermal"] = to_json(c.stage1.thermal);
    Json s1;
    s1["group_count"] = c.stage1.group_count;
    std::vector<double> scan;
    for (double v : c.stage1.gate_time_scan) {
        scan.push_back(std::round(s_to_us(v) * 1e9) * 1e-9);  // drop unit-conversion noise
    }
    s1["gate_time_scan_us"] = scan;
    s1["z_bounds"] = c.stage1.z_bound_schedule;
    s1["top_k"] = c.stage1.top_k;
    s1["restarts"] = c.stage1.restarts;
    s1["relaxed_starts"] = c.stage1.relaxed_starts;
    s1["lattice_points"] = c.stage1.lattice_points;
    s1["exhaustive_threshold"] = c.stage1.exhaustive_threshold;
    s1["enumeration_budget"] = c.stage1.enumeration_budget;
    s1["max_sdks"] = c.stage1.max_sdks;
    j["stage1"] = s1;
    Json s2;
    s2["repetition_rate_mhz"] = c.stage2.repetition_rate * 1e-6;
    s2["timing_variation"] = c.stage2.timing_variation;
    s2["restarts"] = c.stage2.restarts;
    s2["max_sweeps"] = c.stage2.max_sweeps;
    s2["max_step"] = c.stage2.max_step;
    s2["combo_depth"] = c.stage2.combo_depth;
    s2["exhaustive_limit"] = c.stage2.exhaustive_limit;
    j["stage2"] = s2;
    if (c.sweep) {
        Json sw;
        sw["variable"] = c.sweep->variable;
        sw["values"] = c.sweep->values;
        j["sweep"] = sw;
    }
    j["jitter"] = Json{{"samples", c.jitter_samples}};
    Json st;
    st["data"] = c.stark.data_path;
    st["rabi_frequency_rad_s"] = c.stark.rabi_frequency ? Json(*c.stark.rabi_frequency) : Json(nullptr);
    st["pulse_pairs"] = c.stark.pulse_pairs;
    j["stark"] = st;
    j["output"] = Json{{"trajectory_samples", c.trajectory_samples}};
    return j;
}

void apply_overrides(RunConfig &config, const CommandOverrides &o) {
    if (o.seed) {
        config.seed = *o.seed;
        config.stage1.seed = *o.seed;
        config.stage2.seed = *o.seed;
    }
    if (o.threads) {
        if (*o.threads < 1) {
            throw ConfigError("--threads must be >= 1");
        }
        config.threads = *o.threads;
        config.stage1.threads = *o.threads;
    }
    if (o.out_dir) {
        config.out_dir = *o.out_dir;
    }
}

void cmd_modes(const RunConfig &config, std::ostream &out) {
    const ChainModel chain = build_chain(config);
    const auto dir = prepare_out(config);
    Json j;
    j["schema_version"] = kSchemaVersion;
    j["provenance"] = provenance(config, "modes");
    j["axial_frequency_rad_s"] = config.trap.axial_frequency();
    j["chain"] = to_json(chain);
    write_json(dir / "modes.json", j);

    out << "axial trap frequency " << fmt(rad_s_to_mhz(config.trap.axial_frequency()), "%.4f") << " MHz, "
        << chain.num_ions() << " ions\n";
    out << "ion  position_um\n";
    for (int i = 0; i < chain.num_ions(); ++i) {
        char line[64];
        std::snprintf(line, sizeof line, "%3d  %+10.5f\n", i, chain.positions()[i] * 1e6);
        out << line;
    }
    out << "mode  freq_MHz  lamb_dicke  couplings\n";
    for (int m = 0; m < chain.num_modes(); ++m) {
        char line[64];
        std::snprintf(line, sizeof line, "%4d  %8.4f  %.5f   ", m, rad_s_to_mhz(chain.mode_frequencies()[m]),
                      chain.lamb_dicke()[m]);
        out << line;
        for (int i = 0; i < chain.num_ions(); ++i) {
            std::snprintf(line, sizeof line, " %+.4f", chain.coupling(m, i));
            out << line;
        }
        out << "\n";
    }
}

OptimizationResult cmd_optimize(const RunConfig &config, std::ostream &out) {
    const ChainModel chain = build_chain(config);
    const OptimizationResult r = optimize_gate(chain, config.stage1, config.stage2);
    const auto dir = prepare_out(config);
    Json j = to_json(r, chain);
    j["provenance"] = provenance(config, "optimize");
    write_json(dir / "result.json", j);
    write_trajectory(dir / "trajectory_uu.csv", r, chain, kBasisStates[0], config);
    write_trajectory(dir / "trajectory_ud.csv", r, chain, kBasisStates[1], config);
    const std::string summary = summary_text(r, chain);
    write_text(dir / "summary.txt", provenance_line(config, "optimize") + "\n" + summary);
    out << summary;
    return r;
}

void cmd_sweep(const RunConfig &config, std::ostream &out) {
    if (!config.sweep) {
        throw ConfigError("sweep: the config has no 'sweep' block");
    }
    const SweepSpec &sw = *config.sweep;
    std::ostringstream csv;
    csv << provenance_line(config, "sweep") << "\n";
    csv << "variable,value,num_ions,mu,nu,repetition_rate_mhz,epsilon,temperature_k,sdks,gate_time_us,"
           "ideal_infidelity,motional_infidelity,adjusted_infidelity,added_mean,added_p95\n";
    auto row = [&](double value, int ions, const OptimizationResult &r, double eps, const std::string &temp,
                   const GateReport &rep, const std::string &added_mean, const std::string &added_p95) {
        csv << sw.variable << "," << fmt(value) << "," << ions << "," << r.train.targets.first << ","
            << r.train.targets.second << "," << fmt(r.train.repetition_rate * 1e-6) << "," << fmt(eps) << ","
            << temp << "," << rep.sdk_count << "," << fmt(s_to_us(r.sequence.gate_time)) << ","
            << fmt(rep.ideal_infidelity) << "," << fmt(rep.motional_infidelity) << ","
            << fmt(rep.adjusted_infidelity(eps)) << "," << added_mean << "," << added_p95 << "\n";
        out << sw.variable << "=" << fmt(value, "%.6g") << "  ideal " << fmt(rep.ideal_infidelity, "%.3e")
            << "  motional " << fmt(rep.motional_infidelity, "%.3e") << "  adjusted "
            << fmt(rep.adjusted_infidelity(eps), "%.3e");
        if (!added_mean.empty()) {
            out << "  added " << added_mean;
        }
        out << "\n";
    };

    if (sw.variable == "num_ions") {
        for (double v : sw.values) {
            RunConfig c = config;
            c.trap.num_ions = static_cast<int>(std::lround(v));
            if (std::abs(v - c.trap.num_ions) > 1e-9) {
                throw ConfigError("sweep: num_ions values must be integers");
            }
            const ChainModel chain = build_chain(c);
            const OptimizationResult r = optimize_gate(chain, c.stage1, c.stage2);
            row(v, chain.num_ions(), r, r.epsilon, "", r.report, "", "");
        }
    } else if (sw.variable == "repetition_rate") {
        const ChainModel chain = build_chain(config);
        const Stage1Result s1 = stage1(chain, config.stage1);
        for (double v : sw.values) {
            Stage2Config s2 = config.stage2;
            s2.repetition_rate = v * 1e6;
            try {
                const OptimizationResult r = refine_candidates(chain, s1, config.stage1, s2);
                row(v, chain.num_ions(), r, r.epsilon, "", r.report, "", "");
            } catch (const ConfigError &e) {
                // No candidate fits this grid; keep the rest of the sweep.
                csv << sw.variable << "," << fmt(v) << "," << chain.num_ions() << "," << config.stage1.targets.first
                    << "," << config.stage1.targets.second << "," << fmt(v) << "," << fmt(config.stage1.epsilon)
                    << ",,,,,,,,\n";
                out << sw.variable << "=" << fmt(v, "%.6g") << "  infeasible: " << e.what() << "\n";
            }
        }
    } else {
        const ChainModel chain = build_chain(config);
        const OptimizationResult r = optimize_gate(chain, config.stage1, config.stage2);
        for (double v : sw.values) {
            if (sw.variable == "epsilon") {
                row(v, chain.num_ions(), r, v, "", r.report, "", "");
            } else if (sw.variable == "temperature") {
                const GateReport rep =
                    evaluate_train(r.train, chain, ThermalSpec::temperature(v), r.counting);
                row(v, chain.num_ions(), r, r.epsilon, fmt(v), rep, "", "");
            } else {
                const JitterStats js =
                    jitter_sensitivity(r, chain, v, config.jitter_samples, config.seed, config.threads);
                row(v, chain.num_ions(), r, r.epsilon, "", r.report, fmt(js.mean_added), fmt(js.p95_added));
            }
        }
    }
    const auto dir = prepare_out(config);
    write_text(dir / "sweep.csv", csv.str());
}

void cmd_stark(const RunConfig &config, std::ostream &out) {
    ShelvingScenario sc = load_shelving_scenario(config.stark.data_path);
    if (config.stark.rabi_frequency) {
        sc.rabi_frequency = *config.stark.rabi_frequency;
        sc.validate();
    }
    Json j;
    j["schema_version"] = kSchemaVersion;
    j["provenance"] = provenance(config, "stark");
    j["rabi_frequency_rad_s"] = sc.rabi_frequency;
    j["drive_wavelength_m"] = sc.drive_wavelength;
    Json levels = Json::array();
    out << "drive " << sc.drive_label << " at " << fmt(sc.drive_wavelength * 1e9, "%.3f") << " nm, Omega = "
        << fmt(sc.rabi_frequency, "%.4g") << " rad/s\n";
    out << "level   route          lambda_nm  ratio    shift_s^-1\n";
    for (const ShelfLevel &level : sc.levels) {
        Json lj;
        lj["name"] = level.name;
        Json routes = Json::array();
        for (const TransitionData &t : level.routes) {
            const double shift = stark_shift(t, sc);
            routes.push_back(Json{{"label", t.label},
                                  {"wavelength_m", t.wavelength},
                                  {"dipole_ratio", t.dipole_ratio},
                                  {"shift_rad_s", shift}});
            char line[160];
            std::snprintf(line, sizeof line, "%-7s %-14s %9.3f  %.4f   %+.4e\n", level.name.c_str(), t.label.c_str(),
                          t.wavelength * 1e9, t.dipole_ratio, shift);
            out << line;
        }
        lj["routes"] = routes;
        lj["shift_rad_s"] = level_shift(level, sc);
        levels.push_back(lj);
    }
    j["levels"] = levels;
    const double tau = pi_pulse_duration(sc);
    const double phase = qubit_phase_per_pulse(sc);
    const double budget = gate_phase_budget(phase, config.stark.pulse_pairs);
    j["pi_pulse_duration_s"] = tau;
    j["phase_per_pulse_rad"] = phase;
    j["pulse_pairs"] = config.stark.pulse_pairs;
    j["gate_phase_budget_rad"] = budget;
    out << "pi pulse duration   " << fmt(tau * 1e12, "%.4f") << " ps\n";
    out << "phase per pulse     " << fmt(phase, "%+.4e") << " rad (" << sc.levels[1].name << " minus "
        << sc.levels[0].name << ")\n";
    out << "gate budget         " << fmt(budget, "%+.4e") << " rad for " << config.stark.pulse_pairs
        << " pulse pairs\n";
    const auto dir = prepare_out(config);
    write_json(dir / "stark.json", j);
}

bool cmd_evaluate(const RunConfig &config, const std::string &result_path, std::ostream &out) {
    const StoredResult s = stored_result_from_json(read_json_file(result_path));
    const GateReport rep = evaluate_train(s.train, s.chain, s.thermal, s.counting);
    const double adjusted = rep.adjusted_infidelity(s.epsilon);
    auto close = [](double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(std::abs(a), std::abs(b)); };
    const bool ok = close(rep.ideal_infidelity, s.reported_ideal_infidelity) &&
                    close(adjusted, s.reported_adjusted_infidelity);
    Json j;
    j["schema_version"] = kSchemaVersion;
    j["provenance"] = provenance(config, "evaluate");
    j["source"] = result_path;
    j["report"] = to_json(rep);
    j["adjusted_infidelity"] = adjusted;
    j["reported_ideal_infidelity"] = s.reported_ideal_infidelity;
    j["reported_adjusted_infidelity"] = s.reported_adjusted_infidelity;
    j["reproduced"] = ok;
    const auto dir = prepare_out(config);
    write_json(dir / "evaluation.json", j);
    out << "ideal infidelity    " << fmt(rep.ideal_infidelity, "%.12e") << " (stored "
        << fmt(s.reported_ideal_infidelity, "%.12e") << ")\n";
    out << "adjusted infidelity " << fmt(adjusted, "%.12e") << " (stored "
        << fmt(s.reported_adjusted_infidelity, "%.12e") << ")\n";
    out << (ok ? "reproduced\n" : "NOT reproduced\n");
    return ok;
}

}  // namespace fastgate
