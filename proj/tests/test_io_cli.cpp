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

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "fastgate/cli.hpp"
#include "fastgate/errors.hpp"
#include "fastgate/io.hpp"

using namespace fastgate;

namespace {

std::filesystem::path scratch_dir(const std::string &name) {
    const auto dir = std::filesystem::temp_directory_path() / ("fastgate_test_" + name);
    std::filesystem::remove_all(dir);
    return dir;
}

RunConfig tiny_run(const std::filesystem::path &dir) {
    Json j = Json::parse(R"({
        "seed": 3,
        "trap": {"num_ions": 2},
        "gate": {"targets": [0, 1], "epsilon": 1e-5},
        "stage1": {"gate_time_scan_us": {"start": 0.9, "stop": 1.1, "step": 0.1}, "z_bounds": [1, 2, 3], "top_k": 2},
        "stage2": {"restarts": 3},
        "output": {"trajectory_samples": 20}
    })");
    j["out_dir"] = dir.string();
    return parse_run_config(j);
}

}  // namespace

TEST_CASE("chain, sequence, train and thermal survive a JSON round trip") {
    TrapConfig cfg;
    cfg.num_ions = 4;
    cfg.quartic_coefficient = 1e6;
    const ChainModel chain = ChainModel::build(cfg);
    const ChainModel back = chain_from_json(Json::parse(to_json(chain).dump()));
    CHECK(back.positions() == chain.positions());
    CHECK(back.mode_frequencies() == chain.mode_frequencies());
    CHECK(back.lamb_dicke() == chain.lamb_dicke());
    CHECK(back.couplings() == chain.couplings());
    CHECK(back.config().quartic_coefficient == cfg.quartic_coefficient);

    const auto seq = PulseGroupSequence::from_half(std::vector<int>{2, -1}, std::vector<double>{1e-7, 3e-7}, {1, 2},
                                                   0.8e-6);
    const auto seq2 = sequence_from_json(Json::parse(to_json(seq).dump()));
    CHECK(seq2.group_sizes == seq.group_sizes);
    CHECK(seq2.group_times == seq.group_times);
    CHECK(seq2.targets == seq.targets);

    const KickTrain train = expand_groups(seq, 300e6);
    const KickTrain train2 = train_from_json(Json::parse(to_json(train).dump()));
    REQUIRE(train2.kicks.size() == train.kicks.size());
    for (std::size_t i = 0; i < train.kicks.size(); ++i) {
        CHECK(train2.kicks[i].time == train.kicks[i].time);
        CHECK(train2.kicks[i].sign == train.kicks[i].sign);
    }

    CHECK(thermal_from_json(to_json(ThermalSpec::uniform(0.3))).uniform_nbar() == 0.3);
    CHECK(thermal_from_json(to_json(ThermalSpec::occupations({0.1, 0.2}))).per_mode_nbar()[1] == 0.2);
    CHECK(thermal_from_json(to_json(ThermalSpec::temperature(1e-3))).temperature_kelvin() == 1e-3);
    CHECK(thermal_from_json(Json::parse(R"({"rate_hz": 7e7})")).temperature_kelvin() ==
          doctest::Approx(temperature_from_rate(7e7)));
    CHECK_THROWS_AS(thermal_from_json(Json::parse(R"({"nbar": 0.1, "temperature_k": 1})")), ConfigError);
    CHECK(counting_from_string(to_string(PulseCounting::kSdks)) == PulseCounting::kSdks);
    CHECK_THROWS_AS(counting_from_string("photons"), ConfigError);
}

TEST_CASE("run configs round trip and reject unknown keys") {
    const RunConfig c = tiny_run(scratch_dir("cfg"));
    CHECK(c.stage1.gate_time_scan.size() == 3);
    CHECK(c.stage1.seed == 3);
    const Json once = run_config_to_json(c);
    const Json twice = run_config_to_json(parse_run_config(once));
    CHECK(once == twice);

    CHECK_THROWS_AS(parse_run_config(Json::parse(R"({"trap": {"ions": 3}})")), ConfigError);
    CHECK_THROWS_AS(parse_run_config(Json::parse(R"({"colour": 3})")), ConfigError);
    CHECK_THROWS_AS(parse_run_config(Json::parse(R"({"stage2": {"timing_variation": 0.9}})")), ConfigError);
    CHECK_THROWS_AS(parse_run_config(Json::parse(R"({"sweep": {"variable": "colour", "values": [1]}})")),
                    ConfigError);

    const RunConfig sweep = parse_run_config(Json::parse(
        R"({"sweep": {"variable": "epsilon", "start": 1e-5, "stop": 1e-3, "steps": 3, "spacing": "log"}})"));
    REQUIRE(sweep.sweep);
    CHECK(sweep.sweep->values[1] == doctest::Approx(1e-4));

    RunConfig o = c;
    apply_overrides(o, {7, 2, std::string("elsewhere")});
    CHECK(o.stage1.seed == 7);
    CHECK(o.stage2.seed == 7);
    CHECK(o.stage1.threads == 2);
    CHECK(o.out_dir == "elsewhere");
    CHECK_THROWS_AS(apply_overrides(o, {std::nullopt, 0, std::nullopt}), ConfigError);
}

TEST_CASE("optimize writes artifacts that evaluate reproduces") {
    const auto dir = scratch_dir("optimize");
    const RunConfig c = tiny_run(dir);
    std::ostringstream log;
    const OptimizationResult r = cmd_optimize(c, log);
    for (const char *f : {"result.json", "trajectory_uu.csv", "trajectory_ud.csv", "summary.txt"}) {
        CHECK(std::filesystem::exists(dir / f));
    }
    const Json stored = read_json_file((dir / "result.json").string());
    CHECK(stored.at("schema_version") == kSchemaVersion);
    const StoredResult back = stored_result_from_json(stored);
    CHECK(back.reported_adjusted_infidelity == r.adjusted_infidelity);
    CHECK(back.train.kicks.size() == r.train.kicks.size());

    std::ostringstream eval_log;
    CHECK(cmd_evaluate(c, (dir / "result.json").string(), eval_log));
    CHECK(std::filesystem::exists(dir / "evaluation.json"));

    // Same seed, same bytes.
    const auto dir2 = scratch_dir("optimize2");
    RunConfig c2 = tiny_run(dir2);
    std::ostringstream log2;
    cmd_optimize(c2, log2);
    std::ifstream a(dir / "result.json"), b(dir2 / "result.json");
    std::stringstream sa, sb;
    sa << a.rdbuf();
    sb << b.rdbuf();
    Json ja = Json::parse(sa.str()), jb = Json::parse(sb.str());
    ja.erase("provenance");
    jb.erase("provenance");
    CHECK(ja == jb);

    Json wrong = stored;
    wrong["schema_version"] = kSchemaVersion + 1;
    CHECK_THROWS_AS(stored_result_from_json(wrong), ConfigError);
}

TEST_CASE("modes and stark commands write their files") {
    const auto dir = scratch_dir("modes");
    RunConfig c = tiny_run(dir);
    c.stark.data_path = std::string(FASTGATE_SOURCE_DIR) + "/data/ca40_shelving.json";
    std::ostringstream out;
    cmd_modes(c, out);
    CHECK(std::filesystem::exists(dir / "modes.json"));
    cmd_stark(c, out);
    const Json s = read_json_file((dir / "stark.json").string());
    CHECK(s.dump().find("pi_pulse") != std::string::npos);
}

TEST_CASE("repetition-rate sweep keeps going past an infeasible rate") {
    const auto dir = scratch_dir("sweep_rate");
    RunConfig c = tiny_run(dir);
    c.sweep = SweepSpec{"repetition_rate", {300.0, 1.0}};
    std::ostringstream out;
    cmd_sweep(c, out);
    CHECK(out.str().find("repetition_rate=1  infeasible") != std::string::npos);
    std::ifstream in(dir / "sweep.csv");
    std::string line;
    std::vector<std::string> lines;
    while (std::getline(in, line)) {
        lines.push_back(line);
    }
    REQUIRE(lines.size() == 4);
    CHECK(std::count(lines[3].begin(), lines[3].end(), ',') == std::count(lines[1].begin(), lines[1].end(), ','));
    CHECK(lines[3].find(",,,") != std::string::npos);
    CHECK(lines[2].find(",,,") == std::string::npos);
}
