#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "equiboot/experiment.hpp"

int main(int argc, char** argv) {
    CLI::App app{"equity-directed bootstrapping for imbalanced binary classification"};
    app.require_subcommand(1);

    std::string config_path, scenario, out_dir, data_path, out_csv;
    std::uint64_t seed = 0;

    CLI::App* sim = app.add_subcommand("simulate", "run the synthetic-data simulation study");
    sim->add_option("--config", config_path, "experiment config file")->required();
    sim->add_option("--scenario", scenario, "run a single scenario preset");
    sim->add_option("--seed", seed, "override the master seed");
    sim->add_option("--out", out_dir, "override the output directory");

    CLI::App* pipe = app.add_subcommand("pipeline", "blind vs equity bootstrap on a CSV dataset");
    pipe->add_option("--data", data_path, "input CSV")->required();
    pipe->add_option("--config", config_path, "experiment config file")->required();

    CLI::App* gen = app.add_subcommand("gen", "dump one synthetic dataset as CSV");
    gen->add_option("--config", config_path, "experiment config file")->required();
    gen->add_option("--out", out_csv, "output CSV path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1; // malformed invocation is a config error
    }

    try {
        if (sim->parsed()) {
            equiboot::ExperimentConfig cfg = equiboot::parse_config_file(config_path);
            cfg.mode = equiboot::RunMode::simulate;
            if (sim->count("--scenario")) cfg.scenarios = {scenario};
            if (sim->count("--seed")) cfg.master_seed = seed;
            if (sim->count("--out")) cfg.output_dir = out_dir;
            const equiboot::Table4Report report = equiboot::run_simulation(cfg);
            equiboot::write_table4(report, cfg.output_dir);
            equiboot::render_table4(report, std::cout);
        } else if (pipe->parsed()) {
            equiboot::ExperimentConfig cfg = equiboot::parse_config_file(config_path);
            cfg.mode = equiboot::RunMode::dataset;
            const equiboot::Dataset data = equiboot::load_csv(data_path, cfg.schema);
            const equiboot::PipelineReport report = equiboot::run_dataset_pipeline(cfg, data);
            equiboot::write_pipeline(report, cfg.output_dir);
            equiboot::render_pipeline(report, std::cout);
        } else {
            equiboot::ExperimentConfig cfg = equiboot::parse_config_file(config_path);
            equiboot::SimConfig sc = cfg.sim;
            if (!cfg.scenarios.empty() && cfg.scenarios.front() != "all")
                sc = equiboot::resolve_scenario(cfg.scenarios.front(), cfg);
            if (sc.seed == 0) sc.seed = cfg.master_seed;
            equiboot::write_csv(equiboot::simulate_dataset(sc).data, out_csv);
        }
    } catch (const equiboot::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
