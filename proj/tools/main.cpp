#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "renecast/error.hpp"
#include "renecast/pipeline.hpp"

#include "CLI11.hpp"

namespace {

constexpr int kExitInput = 2;
constexpr int kExitModel = 3;
constexpr int kExitIo = 4;

struct Options {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> horizon;
    std::optional<std::string> out_dir;
    bool strict_geo = false;
};

// Precedence: flag > config file > built-in default.
renecast::pipeline::RunConfig make_config(const Options& options) {
    auto config = renecast::pipeline::RunConfig::load(options.config_path);
    if (options.seed) {
        config.seed = *options.seed;
        config.gbrt.seed = *options.seed;
        config.trend.seed = *options.seed;
    }
    if (options.horizon) config.horizon_year = *options.horizon;
    if (options.out_dir) config.output_dir = *options.out_dir;
    if (options.strict_geo) config.strict_geo = true;
    return config;
}

void add_common_flags(CLI::App* cmd, Options& options) {
    cmd->add_option("--config", options.config_path, "JSON run configuration")
        ->required();
    cmd->add_option("--seed", options.seed, "override every seeded stage");
    cmd->add_option("--horizon", options.horizon, "forecast horizon year");
    cmd->add_option("--out", options.out_dir, "output directory");
    cmd->add_flag("--strict-geo", options.strict_geo,
                  "fail on GeoJSON features without a usable ISO code");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"renecast: renewable generation forecasting pipeline"};
    app.require_subcommand(1);

    Options options;
    auto* ingest = app.add_subcommand("ingest", "parse, filter, impute, snapshot");
    auto* forecast = app.add_subcommand("forecast", "fit models and write projections");
    auto* validate = app.add_subcommand("validate", "cross-validation and backtest");
    auto* render = app.add_subcommand("render", "write the SVG figures");
    auto* report = app.add_subcommand("report", "print the headline summary");
    for (auto* cmd : {ingest, forecast, validate, render, report}) {
        add_common_flags(cmd, options);
    }

    CLI11_PARSE(app, argc, argv);

    try {
        const auto config = make_config(options);
        if (ingest->parsed()) {
            std::cout << renecast::pipeline::cmd_ingest(config).to_string();
        } else if (forecast->parsed()) {
            renecast::pipeline::cmd_forecast(config);
            std::cout << "wrote " << renecast::pipeline::kForecastFile << " and "
                      << renecast::pipeline::kReportFile << " under " << config.output_dir
                      << "\n";
        } else if (validate->parsed()) {
            std::cout << renecast::pipeline::cmd_validate(config);
        } else if (render->parsed()) {
            renecast::pipeline::cmd_render(config);
            std::cout << "wrote " << renecast::pipeline::kChoroplethFile << ", "
                      << renecast::pipeline::kStackedFile << ", "
                      << renecast::pipeline::kShareLinesFile << " under "
                      << config.output_dir << "\n";
        } else if (report->parsed()) {
            std::cout << renecast::pipeline::cmd_report(config);
        }
    } catch (const renecast::InputError& e) {
        std::cerr << "[E2] " << e.what() << "\n";
        return kExitInput;
    } catch (const renecast::IoError& e) {
        std::cerr << "[E4] " << e.what() << "\n";
        return kExitIo;
    } catch (const renecast::ModelError& e) {
        std::cerr << "[E3] " << e.what() << "\n";
        return kExitModel;
    } catch (const std::exception& e) {
        std::cerr << "[E3] " << e.what() << "\n";
        return kExitModel;
    }
    return 0;
}
