// skylink: run mission scenarios and inspect their pieces.
//
// Exit status: 0 all requirements met, 1 a requirement failed,
// 2 bad configuration (parse, unit, validation, missing files).

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "skylink/skylink.hpp"

namespace fs = std::filesystem;
using namespace skylink;

namespace {

constexpr int exit_pass = 0;
constexpr int exit_requirement = 1;
constexpr int exit_config = 2;

struct Common {
    std::string preset;
    std::string scenario;
    std::optional<std::uint64_t> seed;
    std::string out;
    unsigned workers = 0;
};

void add_common(CLI::App* cmd, Common& c, const std::string& default_preset) {
    c.preset = default_preset;
    cmd->add_option("--preset", c.preset, "named preset (see `skylink run --list`)")->capture_default_str();
    cmd->add_option("--scenario", c.scenario, "scenario file; overrides --preset");
    cmd->add_option("--seed", c.seed, "master seed; overrides the scenario");
    cmd->add_option("--out", c.out, "output directory");
    cmd->add_option("--workers", c.workers, "worker threads; overrides the scenario");
}

Scenario load(const Common& c) {
    Scenario s = c.scenario.empty() ? load_preset(c.preset) : parse_scenario(c.scenario);
    if (c.seed) s.seeds.master = *c.seed;
    if (c.workers) s.mission.workers = c.workers;
    s.validate();
    return s;
}

void print_table(const Table& t) { std::cout << to_csv(t); }

int cmd_run(const Common& c, bool list) {
    if (list) {
        for (const auto& n : list_presets()) std::cout << n << "\n";
        return exit_pass;
    }
    const Scenario s = load(c);
    const MissionReport r = run_scenario(s);
    const fs::path dir = c.out.empty() ? fs::path("out") / s.mission.name : fs::path(c.out);
    emit_report(r, dir);
    std::cout << summary_text(r) << "report written to " << dir.string() << "\n";
    return r.all_passed() ? exit_pass : exit_requirement;
}

int cmd_budget(const Common& c, std::optional<double> elevation) {
    const Scenario s = load(c);
    Table budget;
    if (s.atmosphere.fixed_loss_db) {
        budget = detail::budget_table(LinkBudget::from_total(from_db(-*s.atmosphere.fixed_loss_db)));
    } else {
        const double el = elevation.value_or(s.mission.max_elevation_deg);
        const double range = slant_range_km(s.orbit.altitude_m / 1e3, el);
        std::cout << "# " << s.stations.at(0).site.name << " at " << format_number(el) << " deg, "
                  << format_number(range) << " km\n";
        budget = detail::budget_table(link_loss(s.link_config(0), range, el));
    }
    print_table(budget);
    if (!c.out.empty()) {
        write_csv(fs::path(c.out) / "budget.csv", budget);
        if (!s.atmosphere.fixed_loss_db) {
            for (std::size_t i = 0; i < s.stations.size(); ++i) {
                const std::string name = s.stations.size() == 1 ? "loss_vs_elevation.csv"
                                                                : "loss_vs_elevation_" + s.stations[i].site.name + ".csv";
                write_csv(fs::path(c.out) / "plots" / name, detail::loss_vs_elevation(s, i));
            }
        }
    }
    return exit_pass;
}

int cmd_bell(const Common& c, std::optional<double> fidelity, std::uint64_t trials) {
    const Scenario s = load(c);
    const double f = fidelity.value_or(s.source.fidelity);
    const auto state = TwoQubitState::from_fidelity(f);
    const auto exact = chsh_analytic(state);
    const auto sampled = chsh_sampled(state, ChshSettings{}, trials, s.seeds.master, s.mission.workers);
    Table t{{"setting_a_deg", "setting_b_deg", "E_analytic", "E_sampled", "stderr"}, {}};
    const auto pairs = ChshSettings{}.pairs();
    for (std::size_t k = 0; k < 4; ++k) {
        t.add({pairs[k].first * constants::rad_to_deg, pairs[k].second * constants::rad_to_deg, exact.E[k], sampled.E[k],
               sampled.E_stderr[k]});
    }
    print_table(t);
    std::cout << "fidelity = " << format_number(f) << "\n"
              << "S_analytic = " << format_number(exact.S) << "\n"
              << "S_sampled = " << format_number(sampled.S) << " +- " << format_number(sampled.standard_error) << "\n"
              << "local_bound = " << format_number(local_deterministic_max_S()) << "\n";
    if (!c.out.empty()) write_csv(fs::path(c.out) / "plots" / "bell.csv", t);
    return sampled.S > local_deterministic_max_S() ? exit_pass : exit_requirement;
}

int cmd_gravity(const Common& c, double from, double to, double step, bool general) {
    const Scenario s = load(c);
    const EarthModel earth;
    const auto form = general ? DeltaTFormulation::general : DeltaTFormulation::local_clock;
    const double dt = calibrate_coherence_time(earth, s.orbit.altitude_m, s.protocol.reference_angle_deg,
                                               s.protocol.reference_decorrelation, form);
    EventFormalismParams model{dt, s.orbit.altitude_m, form, earth};
    Table t{{"theta_deg", "delta_t_s", "D"}, {}};
    for (const auto& row : decoherence_sweep(model, from, to, step)) t.add({row.theta_deg, row.delta_t_s, row.D});
    std::cout << "# coherence_time_s = " << format_number(dt) << " (D = "
              << format_number(s.protocol.reference_decorrelation) << " at "
              << format_number(s.protocol.reference_angle_deg) << " deg)\n";
    print_table(t);
    if (!c.out.empty()) write_csv(fs::path(c.out) / "plots" / "decoherence.csv", t);
    return exit_pass;
}

int cmd_plan(const Common& c, std::optional<int> stations, std::optional<double> key_per_pass_mbit) {
    Scenario s = load(c);
    if (stations) s.protocol.stations_served = *stations;
    if (key_per_pass_mbit) s.protocol.key_per_pass_bits = *key_per_pass_mbit * 1e6;
    s.mission.kind = MissionKind::constellation_plan;
    const auto r = run_scenario(s);
    for (const auto& [k, v] : r.summary) std::cout << k << " = " << v << "\n";
    if (!c.out.empty()) emit_report(r, c.out);
    return exit_pass;
}

int cmd_keys(const Common& c) {
    require(!c.out.empty(), ErrorKind::validation, "keys needs --out pointing at a report directory");
    fs::path dir = fs::path(c.out) / "keys" / "store";
    if (!fs::exists(dir)) dir = c.out;
    const KeyStore store = KeyStore::load(dir);
    Table t{{"id", "owner_a", "owner_b", "bytes", "consumed"}, {}};
    for (const auto& id : store.ids()) {
        const auto k = store.get(id);
        t.add({k.id, k.owners.first, k.owners.second, static_cast<double>(k.bytes.size()),
               std::string(k.consumed ? "true" : "false")});
    }
    print_table(t);
    std::cout << "available_bytes = " << store.available_bytes() << "\n";
    return exit_pass;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Satellite quantum link simulator"};
    app.require_subcommand(1);

    Common run_c, budget_c, bell_c, gravity_c, plan_c, keys_c;
    bool list = false;
    auto* run = app.add_subcommand("run", "run a scenario and write its report");
    add_common(run, run_c, "micius-qkd-xinglong");
    run->add_flag("--list", list, "list presets and exit");

    std::optional<double> elevation;
    auto* budget = app.add_subcommand("budget", "link budget at one elevation");
    add_common(budget, budget_c, "micius-qkd-xinglong");
    budget->add_option("--elevation", elevation, "elevation in deg (default: scenario peak)");

    std::optional<double> fidelity;
    std::uint64_t trials = 1167;
    auto* bell = app.add_subcommand("bell", "CHSH test on a Werner state");
    add_common(bell, bell_c, "micius-entanglement-dlh-ljg");
    bell->add_option("--fidelity", fidelity, "state fidelity (default: source fidelity)");
    bell->add_option("--trials", trials, "sampled trials")->capture_default_str();

    double from = 10.0, to = 90.0, step = 1.0;
    bool general = false;
    auto* gravity = app.add_subcommand("gravity", "decorrelation factor against elevation");
    add_common(gravity, gravity_c, "gravity-micius");
    gravity->add_option("--from", from, "first angle, deg")->capture_default_str();
    gravity->add_option("--to", to, "last angle, deg")->capture_default_str();
    gravity->add_option("--step", step, "angle step, deg")->capture_default_str();
    gravity->add_flag("--general", general, "use the full potential difference instead of the local-clock form");

    std::optional<int> stations;
    std::optional<double> key_per_pass;
    auto* plan = app.add_subcommand("plan", "constellation pass statistics and key throughput");
    add_common(plan, plan_c, "constellation-3x900");
    plan->add_option("--stations", stations, "stations served");
    plan->add_option("--key-per-pass", key_per_pass, "key per pass in Mbit (0: simulate one pass)");

    auto* keys = app.add_subcommand("keys", "list the key store of a report");
    add_common(keys, keys_c, "micius-relay-xinglong-graz");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_config;
    }

    try {
        if (*run) return cmd_run(run_c, list);
        if (*budget) return cmd_budget(budget_c, elevation);
        if (*bell) return cmd_bell(bell_c, fidelity, trials);
        if (*gravity) return cmd_gravity(gravity_c, from, to, step, general);
        if (*plan) return cmd_plan(plan_c, stations, key_per_pass);
        if (*keys) return cmd_keys(keys_c);
    } catch (const Error& e) {
        std::cerr << "skylink: " << e.what() << "\n";
        return exit_config;
    }
    return exit_config;
}
