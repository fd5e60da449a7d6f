// rsense: dephasing-probe sensing of the dipolar interaction strength.
//
//   rsense <features|gamma|qfi|envelope|critical|nonmarkov|convert> --config <path>
//          [--jobs N] [--out <path>] [--format csv|json] [--chi c1,c2,...]
//
// Exit codes: 0 success, 2 invalid config (including a nonmarkov dt too coarse
// for the roton period), 3 numerical failure.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rsense/cli.hpp"

int main(int argc, char** argv) {
    using namespace rsense;

    CLI::App app{"Impurity-qubit dephasing in a quasi-2D dipolar BEC: dispersion, decoherence, QFI"};
    app.require_subcommand(1);

    std::string config_path;
    unsigned jobs = 0;
    std::string out;
    std::string format;
    std::vector<double> chi;
    double t_max = 0.0;
    std::size_t t_steps = 0;
    double horizon = 0.0;
    double dt = 0.0;

    for (const auto& name : cli::command_names()) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "JSON run configuration")->required()->check(CLI::ExistingFile);
        sub->add_option("--jobs", jobs, "worker threads (results are identical for any value)");
        sub->add_option("--out", out, "output file (default: stdout)");
        sub->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--chi", chi, "override the chi scan list")->delimiter(',');
        sub->add_option("--t-max", t_max, "override t_max");
        sub->add_option("--t-steps", t_steps, "override t_steps");
        sub->add_option("--horizon", horizon, "override the non-Markovianity horizon T");
        sub->add_option("--dt", dt, "override the non-Markovianity sampling step");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? cli::kExitOk : cli::kExitInvalidConfig;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    try {
        cli::RunConfig config = cli::load_config(config_path);
        if (jobs) config.jobs = jobs;
        if (!out.empty()) config.out = out;
        if (!format.empty()) config.format = (format == "json") ? cli::Format::Json : cli::Format::Csv;
        if (!chi.empty()) config.chi = chi;
        if (t_max > 0.0) config.t_max = t_max;
        if (t_steps) config.t_steps = t_steps;
        if (horizon > 0.0) config.horizon = horizon;
        if (dt > 0.0) config.dt = dt;
        config.check();

        const auto output = cli::run_command(command, config);
        cli::write_output(output, config);
    } catch (const ResolutionError& e) {
        std::cerr << "rsense " << command << ": invalid configuration: " << e.what() << '\n';
        return cli::kExitInvalidConfig;
    } catch (const InvalidParameter& e) {
        std::cerr << "rsense " << command << ": invalid configuration: " << e.what() << '\n';
        return cli::kExitInvalidConfig;
    } catch (const Error& e) {
        std::cerr << "rsense " << command << ": numerical failure: " << e.what() << '\n';
        return cli::kExitNumerical;
    }
    return cli::kExitOk;
}
