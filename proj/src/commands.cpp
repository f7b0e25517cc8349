#include <cmath>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>

#include <CLI11.hpp>

#include "vcsim/cli.hpp"
#include "vcsim/error.hpp"
#include "vcsim/ldp.hpp"
#include "vcsim/trust.hpp"

namespace vcsim::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

int exit_code_for(const Error& e) {
    switch (e.kind()) {
    case ErrorKind::configuration:
    case ErrorKind::domain:
    case ErrorKind::stability:
        return exit_usage;
    default:
        return exit_runtime;
    }
}

struct Common {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out_dir = ".";
    unsigned jobs = 1;
    std::vector<std::string> overrides;
};

void add_common(CLI::App* app, Common& c, bool with_config) {
    if (with_config) app->add_option("--config", c.config, "Scenario config or run manifest (JSON)");
    app->add_option("--seed", c.seed, "64-bit seed; overrides the config");
    app->add_option("--out-dir", c.out_dir, "Directory for output files");
    app->add_option("--jobs", c.jobs, "Concurrent workers")->check(CLI::PositiveNumber);
}

std::string fixed(double v) {
    std::ostringstream os;
    os << std::setprecision(10) << v;
    return os.str();
}

int cmd_simulate(const Common& c, std::ostream& out) {
    const auto started = utc_timestamp();
    json doc = read_config_document(c.config);
    for (const auto& o : c.overrides) apply_override(doc, o);
    if (c.seed) doc["seed"] = *c.seed;
    const auto config = config_from_json(doc);

    const auto result = run_experiment(config);
    const fs::path dir(c.out_dir);
    auto files = write_simulation(result, dir);

    Manifest m;
    m.command = "simulate";
    m.config = config_to_json(config);
    m.seed = config.seed;
    m.started_at = started;
    m.finished_at = utc_timestamp();
    m.outputs = files;
    m.outputs.push_back("manifest.json");
    m.warnings = result.warnings;
    write_manifest(m, dir);

    out << "simulated " << result.rounds.size() << " rounds of '" << config.name << "' into "
        << dir.string() << "\n";
    for (const auto& w : result.warnings) out << "warning: " << w << "\n";
    return exit_ok;
}

struct LdpArgs {
    double lambda = 2.0;
    double Lambda = 1.0;
    double b = 1.0;
    double epsilon = 0.1;
    double L = 1.0;
    std::uint64_t horizon = 2000;
    std::uint64_t replicas = 100000;
    std::vector<double> l_values{2, 4, 6, 8};
    bool numeric = false;
};

McOptions mc_options(const LdpArgs& a, const Common& c) {
    McOptions o;
    o.horizon = a.horizon;
    o.replicas = a.replicas;
    o.seed = c.seed.value_or(1);
    o.jobs = c.jobs;
    return o;
}

int cmd_ldp(const std::string& which, const LdpArgs& a, const Common& c, bool write_files,
            std::ostream& out, std::ostream& err) {
    if (which == "rate") {
        out << fixed(rate_function(a.b, a.lambda, a.Lambda)) << "\n";
        if (a.numeric) {
            const auto m = rate_function_numeric(a.b, a.lambda, a.Lambda);
            out << "numeric " << fixed(m.value) << " at t=" << fixed(m.argmin) << "\n";
        }
        if (a.b > 0.0 && a.b < 2.0 * (a.lambda - a.Lambda))
            err << "note: b < 2(lambda - Lambda); the minimising t = b/(lambda - Lambda) is below 2\n";
        return exit_ok;
    }
    if (which == "valve") {
        out << fixed(effective_valve(a.epsilon, a.lambda, a.Lambda)) << "\n";
        return exit_ok;
    }
    if (which == "merit") {
        out << fixed(effective_merit(a.epsilon, a.Lambda, a.L)) << "\n";
        return exit_ok;
    }

    const auto started = utc_timestamp();
    const auto opt = mc_options(a, c);
    json params = {{"lambda", a.lambda}, {"Lambda", a.Lambda}, {"horizon", a.horizon},
                   {"replicas", a.replicas}, {"seed", opt.seed}};
    std::vector<std::string> header{"level", "probability", "stderr", "hits", "replicas", "horizon"};
    std::vector<std::vector<std::string>> rows;
    auto row = [&](double level, const McEstimate& e) {
        rows.push_back({format_double(level), format_double(e.probability), format_double(e.stderr_),
                        std::to_string(e.hits), std::to_string(e.replicas),
                        std::to_string(e.horizon)});
        out << "L=" << fixed(level) << " p=" << fixed(e.probability) << " +/- "
            << fixed(e.stderr_) << " (" << e.hits << "/" << e.replicas << ")\n";
    };

    std::string file;
    if (which == "mc") {
        params["L"] = a.L;
        row(a.L, mc_failure_rate(a.lambda, a.Lambda, a.L, opt));
        file = "mc.csv";
    } else {
        params["b"] = a.b;
        params["l"] = a.l_values;
        const auto fit = verify_decay(a.lambda, a.Lambda, a.b, a.l_values, opt);
        for (std::size_t i = 0; i < fit.l_values.size(); ++i)
            row(fit.l_values[i] * a.b, fit.estimates[i]);
        out << "slope " << fixed(fit.slope) << " expected " << fixed(fit.expected) << "\n";
        rows.push_back({"slope", format_double(fit.slope), "", "", "", ""});
        rows.push_back({"expected", format_double(fit.expected), "", "", "", ""});
        file = "decay.csv";
    }
    if (write_files) {
        const fs::path dir(c.out_dir);
        fs::create_directories(dir);
        write_csv(dir / file, header, rows);
        Manifest m;
        m.command = "ldp " + which;
        m.config = params;
        m.seed = opt.seed;
        m.started_at = started;
        m.finished_at = utc_timestamp();
        m.outputs = {file, "manifest.json"};
        write_manifest(m, dir);
    }
    return exit_ok;
}

struct IcArgs {
    double alpha = 0.5;
    std::string form = "logarithmic";
    double grid = 0.01;
};

int cmd_ic_check(const IcArgs& a, const Common& c, bool write_files, std::ostream& out) {
    const auto form = parse_score_form(a.form);
    require(a.grid > 0.0 && a.grid <= 0.01 + 1e-12, ErrorKind::configuration,
            "grid step " + fixed(a.grid) + " is too coarse; it must be at most 0.01");
    require(a.alpha >= 0.0 && a.alpha <= 1.0, ErrorKind::configuration, "alpha must lie in [0,1]");

    double worst_prior = 0.0, worst_post = 0.0;
    std::vector<std::vector<std::string>> rows;
    for (int x = 1; x <= 9; ++x) {
        for (int y = 1; y <= 9; ++y) {
            const double p1 = 0.1 * x, p2 = 0.1 * y;
            const auto r = ic_check(p1, p2, a.alpha, form, a.grid);
            // A report with zero weight is unconstrained.
            const double dp = a.alpha > 0.0 ? std::abs(r.argmax_prior - p1) : 0.0;
            const double dq = a.alpha < 1.0 ? std::abs(r.argmax_posterior - p2) : 0.0;
            worst_prior = std::max(worst_prior, dp);
            worst_post = std::max(worst_post, dq);
            rows.push_back({format_double(p1), format_double(p2), format_double(r.argmax_prior),
                            format_double(r.argmax_posterior), format_double(dp),
                            format_double(dq)});
        }
    }
    const bool ok = worst_prior <= a.grid + 1e-9 && worst_post <= a.grid + 1e-9;
    out << "form " << to_string(form) << " alpha " << fixed(a.alpha) << " grid " << fixed(a.grid)
        << "\nmax prior deviation " << fixed(worst_prior) << "\nmax posterior deviation "
        << fixed(worst_post) << "\n"
        << (ok ? "truthful reports maximise expected trust" : "deviation exceeds the grid step")
        << "\n";
    if (write_files) {
        const fs::path dir(c.out_dir);
        fs::create_directories(dir);
        write_csv(dir / "ic_check.csv",
                  {"p1", "p2", "argmax_prior", "argmax_posterior", "prior_deviation",
                   "posterior_deviation"},
                  rows);
    }
    return ok ? exit_ok : exit_runtime;
}

int cmd_reproduce(const std::string& target, const std::string& scenario_dir, const Common& c,
                  std::ostream& out) {
    const auto started = utc_timestamp();
    std::vector<std::string> overrides = c.overrides;
    if (c.seed) overrides.push_back("seed=" + std::to_string(*c.seed));
    std::vector<std::string> warnings;
    json used;
    const fs::path dir(c.out_dir);
    auto files = reproduce(target, scenario_dir.empty() ? default_scenario_dir() : fs::path(scenario_dir),
                           dir, overrides, warnings, used);
    Manifest m;
    m.command = "reproduce " + target;
    m.config = used;
    m.seed = used.is_object() ? used["seed"].get<std::uint64_t>() : 0;
    m.started_at = started;
    m.finished_at = utc_timestamp();
    m.outputs = files;
    m.outputs.push_back("manifest.json");
    m.warnings = warnings;
    write_manifest(m, dir);
    for (const auto& f : files) out << (dir / f).string() << "\n";
    for (const auto& w : warnings) out << "warning: " << w << "\n";
    return exit_ok;
}

} // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Voting consensus simulator and large-deviation toolkit", std::string(kToolName)};
    app.set_version_flag("--version", std::string(kToolVersion));
    app.require_subcommand(1);

    Common common;

    auto* sim = app.add_subcommand("simulate", "Run a scenario and export CSV results");
    add_common(sim, common, true);
    sim->add_option("--set", common.overrides, "Override a config field: key=value");
    sim->get_option("--config")->required();

    LdpArgs la;
    bool ldp_write = false;
    auto* ldp = app.add_subcommand("ldp", "Large-deviation formulas and Monte Carlo checks");
    ldp->require_subcommand(1);
    auto* rate = ldp->add_subcommand("rate", "Rate function I(b)");
    rate->add_option("--b", la.b)->required();
    rate->add_option("--lambda", la.lambda)->required();
    rate->add_option("--Lambda", la.Lambda)->required();
    rate->add_flag("--numeric", la.numeric, "Also print the variational minimum");
    auto* valve = ldp->add_subcommand("valve", "Effective selection valve L*(epsilon)");
    valve->add_option("--epsilon", la.epsilon)->required();
    valve->add_option("--lambda", la.lambda)->required();
    valve->add_option("--Lambda", la.Lambda)->required();
    auto* merit_cmd = ldp->add_subcommand("merit", "Effective expectation of merit lambda*(epsilon)");
    merit_cmd->add_option("--epsilon", la.epsilon)->required();
    merit_cmd->add_option("--Lambda", la.Lambda)->required();
    merit_cmd->add_option("--L", la.L)->required();
    auto* mc = ldp->add_subcommand("mc", "Monte Carlo voting failure rate P(sup Q > L)");
    mc->add_option("--lambda", la.lambda)->required();
    mc->add_option("--Lambda", la.Lambda)->required();
    mc->add_option("--L", la.L)->required();
    auto* decay = ldp->add_subcommand("decay", "Fit the decay of P(sup Q > l b) in l");
    decay->add_option("--lambda", la.lambda)->required();
    decay->add_option("--Lambda", la.Lambda)->required();
    decay->add_option("--b", la.b)->required();
    decay->add_option("--l", la.l_values, "Increasing l values")->delimiter(',');
    for (auto* sub : {mc, decay}) {
        sub->add_option("--horizon", la.horizon)->check(CLI::PositiveNumber);
        sub->add_option("--replicas", la.replicas)->check(CLI::PositiveNumber);
        add_common(sub, common, false);
    }

    IcArgs ia;
    auto* ic = app.add_subcommand("ic-check", "Check that truthful beliefs maximise expected trust");
    ic->add_option("--alpha", ia.alpha);
    ic->add_option("--form", ia.form, "logarithmic or quadratic");
    ic->add_option("--grid", ia.grid, "Grid step, at most 0.01");
    add_common(ic, common, false);

    std::string target, scenario_dir;
    auto* rep = app.add_subcommand("reproduce", "Emit the data behind a figure or table");
    rep->add_option("target", target, "fig2|fig3|fig4|fig5|fig7|fig8|table1|table2")->required();
    rep->add_option("--scenario-dir", scenario_dir, "Directory with canned scenarios");
    rep->add_option("--set", common.overrides, "Override a scenario field: key=value");
    add_common(rep, common, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return exit_ok;
    } catch (const CLI::CallForVersion&) {
        out << kToolVersion << "\n";
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return exit_usage;
    }

    try {
        if (sim->parsed()) return cmd_simulate(common, out);
        if (ldp->parsed()) {
            for (auto* sub : {rate, valve, merit_cmd, mc, decay}) {
                if (!sub->parsed()) continue;
                const auto* dir_opt = sub->get_option_no_throw("--out-dir");
                ldp_write = dir_opt != nullptr && dir_opt->count() > 0;
                return cmd_ldp(sub->get_name(), la, common, ldp_write, out, err);
            }
        }
        if (ic->parsed()) return cmd_ic_check(ia, common, ic->count("--out-dir") > 0, out);
        if (rep->parsed()) return cmd_reproduce(target, scenario_dir, common, out);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return exit_runtime;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_runtime;
    }
    return exit_usage;
}

} // namespace vcsim::cli
