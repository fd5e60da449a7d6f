#include "rsense/cli.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <fstream>
#include <iostream>
#include <set>
#include <thread>

#include "rsense/dephasing.hpp"
#include "rsense/dispersion.hpp"
#include "rsense/metrology.hpp"

namespace rsense::cli {

namespace {

using io::Cell;
using io::Table;
using nlohmann::json;

const std::string kBlank;

// Maps fn over [0, n) on `jobs` threads; results come back in index order.
template <class T, class Fn>
std::vector<T> parallel_map(std::size_t n, unsigned jobs, Fn fn) {
    std::vector<T> out(n);
    jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
    if (jobs == 1) {
        for (std::size_t i = 0; i < n; ++i) {
            out[i] = fn(i);
        }
        return out;
    }
    std::vector<std::exception_ptr> errors(n);
    std::vector<std::thread> workers;
    for (unsigned j = 0; j < jobs; ++j) {
        workers.emplace_back([&, j] {
            for (std::size_t i = j; i < n; i += jobs) {
                try {
                    out[i] = fn(i);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        });
    }
    for (auto& w : workers) {
        w.join();
    }
    for (const auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
    return out;
}

json base_meta(std::string_view command, const RunConfig& config) {
    return {
        {"schema", "rsense." + std::string(command) + "/1"},
        {"command", command},
        {"params", config.params},
        {"units", io::unit_annotations()},
    };
}

std::vector<double> scan_list(const RunConfig& config) {
    return config.chi.empty() ? std::vector<double>{config.params.chi} : config.chi;
}

double uniform_step(const RunConfig& config) {
    return (config.t_max - config.t_min) / static_cast<double>(config.t_steps - 1);
}

// Curves are only evaluated on stable points; an unstable chi is a config error.
ParamSet stable_point(const RunConfig& config, double chi) {
    const ParamSet p = config.params.with_chi(chi);
    if (validate(p) == Stability::Unstable) {
        throw ConfigError("chi = " + io::format_double(chi) + " is beyond the instability threshold");
    }
    return p;
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
    return j.contains(key) ? j.at(key).get<T>() : fallback;
}

} // namespace

void RunConfig::check() const {
    try {
        params.check();
    } catch (const InvalidParameter& e) {
        throw ConfigError(e.what());
    }
    if (t_steps < 2) {
        throw ConfigError("t_steps must be at least 2");
    }
    if (!(t_min >= 0.0) || !(t_max > t_min)) {
        throw ConfigError("time range must satisfy 0 <= t_min < t_max");
    }
    if (n_max < 1) {
        throw ConfigError("n_max must be at least 1");
    }
    if (!(horizon > 0.0) || !(dt > 0.0)) {
        throw ConfigError("horizon and dt must be positive");
    }
    for (double c : chi) {
        if (!(c >= 0.0) || !std::isfinite(c)) {
            throw ConfigError("chi values must be non-negative");
        }
    }
    for (double P : P_list) {
        if (!(P > 0.0) || !std::isfinite(P)) {
            throw ConfigError("P values must be positive");
        }
    }
    if (jobs == 0) {
        throw ConfigError("jobs must be at least 1");
    }
}

RunConfig parse_config(const json& j) {
    static const std::set<std::string> known = {"params", "physical", "chi",     "P_list", "t_min",
                                                "t_max",  "t_steps",  "n_max",   "horizon", "dt",
                                                "jobs",   "format",   "comment"};
    if (!j.is_object()) {
        throw ConfigError("config must be a JSON object");
    }
    for (const auto& [key, _] : j.items()) {
        if (!known.count(key)) {
            throw ConfigError("unknown config key '" + key + "'");
        }
    }
    RunConfig c;
    try {
        if (j.contains("params")) {
            c.params = j.at("params").get<ParamSet>();
        }
        if (j.contains("physical")) {
            c.physical = j.at("physical").get<PhysicalParams>();
            c.params = dimensionless_from_physical(*c.physical);
        }
        if (j.contains("chi")) {
            const auto& chi = j.at("chi");
            c.chi = chi.is_array() ? chi.get<std::vector<double>>() : std::vector<double>{chi.get<double>()};
        }
        c.P_list = get_or(j, "P_list", std::vector<double>{});
        c.t_min = get_or(j, "t_min", c.t_min);
        c.t_max = get_or(j, "t_max", c.t_max);
        c.t_steps = get_or(j, "t_steps", c.t_steps);
        c.n_max = get_or(j, "n_max", c.n_max);
        c.horizon = get_or(j, "horizon", c.horizon);
        c.dt = get_or(j, "dt", c.dt);
        c.jobs = get_or(j, "jobs", c.jobs);
        const auto format = get_or(j, "format", std::string("csv"));
        if (format == "csv") {
            c.format = Format::Csv;
        } else if (format == "json") {
            c.format = Format::Json;
        } else {
            throw ConfigError("format must be csv or json");
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    } catch (const ConfigError&) {
        throw;
    } catch (const InvalidParameter& e) {
        throw ConfigError(e.what());
    }
    c.check();
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file '" + path + "'");
    }
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
    }
    return parse_config(j);
}

CommandOutput cmd_features(const RunConfig& config) {
    const auto chis = scan_list(config);
    Table table;
    table.columns = {"chi",     "status",  "k_M",  "omega_M",       "curv_M",        "k_m", "omega_m",
                     "curv_m",  "g_m",     "g_M",  "domega_m_dchi", "domega_M_dchi"};
    auto rows = parallel_map<std::vector<Cell>>(chis.size(), config.jobs, [&](std::size_t i) {
        const ParamSet p = config.params.with_chi(chis[i]);
        std::vector<Cell> row(table.columns.size(), kBlank);
        row[0] = chis[i];
        const Stability s = validate(p);
        if (s != Stability::StableRoton) {
            row[1] = std::string(s == Stability::Unstable ? "unstable" : "no-roton");
            return row;
        }
        const auto f = *dispersion::roton_features(p);
        const auto approx = dephasing::singular_approx(p, f);
        row[1] = std::string("roton");
        row[2] = f.maxon.k;
        row[3] = f.maxon.omega;
        row[4] = f.maxon.curvature;
        row[5] = f.roton.k;
        row[6] = f.roton.omega;
        row[7] = f.roton.curvature;
        row[8] = approx.g_m;
        row[9] = approx.g_M;
        row[10] = f.roton.domega_dchi;
        row[11] = f.maxon.domega_dchi;
        return row;
    });
    for (auto& r : rows) {
        table.add_row(std::move(r));
    }
    json meta = base_meta("features", config);
    meta["chi"] = chis;
    return {std::move(table), std::move(meta)};
}

CommandOutput cmd_gamma(const RunConfig& config) {
    const auto chis = scan_list(config);
    const double dt = uniform_step(config);
    Table table;
    table.columns = {"chi", "t", "gamma", "gamma1", "gamma1_tilde"};
    for (double chi : chis) {
        const ParamSet p = stable_point(config, chi);
        const dephasing::ModeTable modes(p, config.t_max);
        const auto values = modes.evaluate_grid(config.t_min, dt, config.t_steps, config.jobs);
        std::optional<dephasing::SpectralApprox> approx;
        if (const auto f = dispersion::roton_features(p)) {
            approx = dephasing::singular_approx(p, *f);
        }
        const double g0 = dephasing::gamma0(p);
        for (std::size_t i = 0; i < values.size(); ++i) {
            const double t = config.t_min + dt * static_cast<double>(i);
            Cell tilde = kBlank;
            if (approx && t > 0.0) {
                tilde = dephasing::gamma1_tilde(t, *approx);
            }
            table.add_row({chi, t, values[i].gamma, values[i].gamma - g0, tilde});
        }
    }
    json meta = base_meta("gamma", config);
    meta["chi"] = chis;
    meta["t"] = {{"min", config.t_min}, {"max", config.t_max}, {"steps", config.t_steps}};
    return {std::move(table), std::move(meta)};
}

CommandOutput cmd_qfi(const RunConfig& config) {
    const auto chis = scan_list(config);
    const double dt = uniform_step(config);
    Table table;
    table.columns = {"chi", "t", "qfi", "gamma", "gamma_dchi", "qfi_tilde", "envelope"};
    json coefficients = json::array();
    for (double chi : chis) {
        const ParamSet p = stable_point(config, chi);
        const dephasing::ModeTable modes(p, config.t_max);
        const auto values = modes.evaluate_grid(config.t_min, dt, config.t_steps, config.jobs);
        std::optional<metrology::EnvelopeCoefficients> env;
        if (dispersion::roton_features(p)) {
            env = metrology::envelope_coefficients(p);
            json optima = json::array();
            for (const auto& lo : metrology::local_optimal_times(*env, config.n_max)) {
                optima.push_back({{"n", lo.n}, {"t", lo.t}, {"qfi", lo.value}});
            }
            coefficients.push_back({{"chi", chi}, {"A", env->A}, {"B", env->B}, {"C", env->C},
                                    {"omega_m", env->omega_m}, {"local_optima", optima}});
        }
        for (std::size_t i = 0; i < values.size(); ++i) {
            const double t = config.t_min + dt * static_cast<double>(i);
            Cell tilde = kBlank;
            Cell envelope = kBlank;
            if (env && t > 0.0) {
                tilde = metrology::qfi_tilde(t, *env);
                envelope = metrology::qfi_envelope(t, *env);
            }
            table.add_row({chi, t, metrology::qfi_from(values[i].gamma, values[i].gamma_dchi), values[i].gamma,
                           values[i].gamma_dchi, tilde, envelope});
        }
    }
    json meta = base_meta("qfi", config);
    meta["chi"] = chis;
    meta["t"] = {{"min", config.t_min}, {"max", config.t_max}, {"steps", config.t_steps}};
    meta["envelope_coefficients"] = coefficients;
    return {std::move(table), std::move(meta)};
}

CommandOutput cmd_envelope(const RunConfig& config) {
    const auto chis = scan_list(config);
    Table table;
    table.columns = {"chi", "status", "A", "B", "C", "a_m", "a_M", "omega_m", "gamma0", "gamma0_dchi"};
    auto rows = parallel_map<std::vector<Cell>>(chis.size(), config.jobs, [&](std::size_t i) {
        const ParamSet p = config.params.with_chi(chis[i]);
        std::vector<Cell> row(table.columns.size(), kBlank);
        row[0] = chis[i];
        const Stability s = validate(p);
        if (s != Stability::StableRoton) {
            row[1] = std::string(s == Stability::Unstable ? "unstable" : "no-roton");
            return row;
        }
        const auto c = metrology::envelope_coefficients(p);
        row[1] = std::string("roton");
        row[2] = c.A;
        row[3] = c.B;
        row[4] = c.C;
        row[5] = c.a_m;
        row[6] = c.a_M;
        row[7] = c.omega_m;
        row[8] = c.gamma0;
        row[9] = c.gamma0_dchi;
        return row;
    });
    for (auto& r : rows) {
        table.add_row(std::move(r));
    }
    json meta = base_meta("envelope", config);
    meta["chi"] = chis;
    return {std::move(table), std::move(meta)};
}

CommandOutput cmd_critical(const RunConfig& config) {
    const auto Ps = config.P_list.empty() ? std::vector<double>{config.params.P} : config.P_list;
    Table table;
    table.columns = {"P", "chi_roton", "chi_instability"};
    auto rows = parallel_map<std::vector<Cell>>(Ps.size(), config.jobs, [&](std::size_t i) {
        return std::vector<Cell>{Ps[i], dispersion::critical_chi_roton(Ps[i]),
                                 dispersion::critical_chi_instability(Ps[i])};
    });
    for (auto& r : rows) {
        table.add_row(std::move(r));
    }
    json meta = base_meta("critical", config);
    meta["P"] = Ps;
    return {std::move(table), std::move(meta)};
}

std::vector<double> nonmarkov_from_samples(std::span<const double> gamma, double dt, double horizon) {
    const auto profile = metrology::non_markovianity_profile(gamma);
    std::vector<double> out;
    for (double factor : {1.0, 2.0, 4.0}) {
        const auto idx = static_cast<std::size_t>(std::llround(factor * horizon / dt));
        if (idx >= profile.size()) {
            throw InvalidParameter("Gamma samples do not reach horizon " + io::format_double(factor * horizon));
        }
        out.push_back(profile[idx]);
    }
    return out;
}

CommandOutput cmd_nonmarkov(const RunConfig& config) {
    const auto chis = scan_list(config);
    Table table;
    table.columns = {"chi", "status", "N_T", "N_2T", "N_4T", "ratio_2T_T", "ratio_4T_2T"};
    for (double chi : chis) {
        const ParamSet p = config.params.with_chi(chi);
        std::vector<Cell> row(table.columns.size(), kBlank);
        row[0] = chi;
        const Stability s = validate(p);
        if (s == Stability::Unstable) {
            row[1] = std::string("unstable");
            table.add_row(std::move(row));
            continue;
        }
        row[1] = std::string(s == Stability::StableRoton ? "roton" : "no-roton");
        const auto gamma = metrology::sample_gamma(p, 4.0 * config.horizon, config.dt, config.jobs);
        const auto n = nonmarkov_from_samples(gamma, config.dt, config.horizon);
        row[2] = n[0];
        row[3] = n[1];
        row[4] = n[2];
        row[5] = n[1] / n[0];
        row[6] = n[2] / n[1];
        table.add_row(std::move(row));
    }
    json meta = base_meta("nonmarkov", config);
    meta["chi"] = chis;
    meta["horizon"] = config.horizon;
    meta["dt"] = config.dt;
    return {std::move(table), std::move(meta)};
}

CommandOutput cmd_convert(const RunConfig& config) {
    if (!config.physical) {
        throw ConfigError("convert needs a 'physical' block in the config");
    }
    const ParamSet p = dimensionless_from_physical(*config.physical);
    Table table;
    table.columns = {"P", "Q", "zeta", "chi", "delta_e", "l_A", "l_B"};
    table.add_row({p.P, p.Q, p.zeta, p.chi, excited_level_shift(*config.physical),
                   impurity_width(*config.physical), reservoir_width(*config.physical)});
    json meta = base_meta("convert", config);
    meta["physical"] = *config.physical;
    meta["units"]["delta_e"] = "omega_z";
    meta["units"]["l_A"] = "m";
    meta["units"]["l_B"] = "m";
    return {std::move(table), std::move(meta)};
}

const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names = {"features", "gamma",     "qfi",    "envelope",
                                                   "critical", "nonmarkov", "convert"};
    return names;
}

CommandOutput run_command(std::string_view name, const RunConfig& config) {
    if (name == "features") return cmd_features(config);
    if (name == "gamma") return cmd_gamma(config);
    if (name == "qfi") return cmd_qfi(config);
    if (name == "envelope") return cmd_envelope(config);
    if (name == "critical") return cmd_critical(config);
    if (name == "nonmarkov") return cmd_nonmarkov(config);
    if (name == "convert") return cmd_convert(config);
    throw ConfigError("unknown command '" + std::string(name) + "'");
}

void write_output(const CommandOutput& output, Format format, std::ostream& os) {
    if (format == Format::Csv) {
        io::write_csv(os, output.table);
        return;
    }
    json doc = {{"meta", output.meta}, {"rows", io::table_to_json(output.table)}};
    os << doc.dump(2) << '\n';
}

void write_output(const CommandOutput& output, const RunConfig& config) {
    if (config.out.empty()) {
        write_output(output, config.format, std::cout);
        return;
    }
    std::ofstream os(config.out, std::ios::binary);
    if (!os) {
        throw ConfigError("cannot write output file '" + config.out + "'");
    }
    write_output(output, config.format, os);
    if (config.format == Format::Csv) {
        std::ofstream sidecar(config.out + ".json", std::ios::binary);
        sidecar << output.meta.dump(2) << '\n';
    }
}

} // namespace rsense::cli
