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


#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "fastgate/cli.hpp"
#include "fastgate/errors.hpp"

int main(int argc, char **argv) {
    using namespace fastgate;
    CLI::App app{"Design and evaluate fast pulsed entangling gates in trapped-ion chains"};
    app.require_subcommand(1);

    std::string config_path;
    CommandOverrides overrides;
    std::uint64_t seed = 0;
    int threads = 0;
    std::string out_dir;
    std::string result_path;

    auto add_common = [&](CLI::App *cmd) {
        cmd->add_option("--config", config_path, "JSON run configuration");
        cmd->add_option("--seed", seed, "random seed (overrides the config)");
        cmd->add_option("--threads", threads, "worker threads (overrides the config)")->check(CLI::PositiveNumber);
        cmd->add_option("--out", out_dir, "output directory (overrides the config)");
    };
    CLI::App *modes = app.add_subcommand("modes", "equilibrium positions and axial normal modes");
    CLI::App *optimize = app.add_subcommand("optimize", "two-stage gate optimization");
    CLI::App *sweep = app.add_subcommand("sweep", "parameter sweep written as CSV");
    CLI::App *stark = app.add_subcommand("stark", "AC Stark phase on shelved ions");
    CLI::App *evaluate = app.add_subcommand("evaluate", "re-score a stored result");
    for (CLI::App *cmd : {modes, optimize, sweep, stark, evaluate}) {
        add_common(cmd);
    }
    evaluate->add_option("result", result_path, "result.json written by optimize")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        RunConfig config = config_path.empty() ? parse_run_config(Json::object()) : load_run_config(config_path);
        CLI::App *cmd = app.get_subcommands().front();
        if (cmd->count("--seed")) {
            overrides.seed = seed;
        }
        if (cmd->count("--threads")) {
            overrides.threads = threads;
        }
        if (cmd->count("--out")) {
            overrides.out_dir = out_dir;
        }
        apply_overrides(config, overrides);

        if (*modes) {
            cmd_modes(config, std::cout);
        } else if (*optimize) {
            cmd_optimize(config, std::cout);
        } else if (*sweep) {
            cmd_sweep(config, std::cout);
        } else if (*stark) {
            cmd_stark(config, std::cout);
        } else if (*evaluate) {
            if (!cmd_evaluate(config, result_path, std::cout)) {
                return kExitNumerical;
            }
        }
    } catch (const ConfigError &e) {
        std::cerr << "fastgate: configuration error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const NumericalError &e) {
        std::cerr << "fastgate: numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::exception &e) {
        std::cerr << "fastgate: error: " << e.what() << "\n";
        return kExitNumerical;
    }
    return kExitOk;
}
