#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "csv.hpp"
#include "dynmix/analysis.hpp"
#include "dynmix/analytic.hpp"
#include "dynmix/cli.hpp"
#include "dynmix/collision.hpp"
#include "dynmix/error.hpp"
#include "dynmix/oracle.hpp"
#include "dynmix/stochastic.hpp"
#include "manifest.hpp"
#include "validate.hpp"

namespace dynmix::cli {

namespace {

using Clock = std::chrono::system_clock;

double parse_number(const std::string& text, const std::string& what) {
    if (text.empty()) throw UsageError("empty " + what);
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (end != text.c_str() + text.size() || !std::isfinite(v)) throw UsageError("invalid " + what + ": '" + text + "'");
    return v;
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item.erase(std::remove_if(item.begin(), item.end(), [](unsigned char c) { return std::isspace(c); }), item.end());
        if (!item.empty()) out.push_back(item);
    }
    if (out.empty()) throw UsageError("empty list '" + text + "'");
    return out;
}

std::vector<double> uniform_grid(double t_max, std::size_t points) {
    if (!(t_max > 0.0)) throw UsageError("--t-max must be positive");
    if (points < 2) throw UsageError("--points must be at least 2");
    std::vector<double> grid(points);
    for (std::size_t i = 0; i < points; ++i) grid[i] = t_max * static_cast<double>(i) / static_cast<double>(points - 1);
    return grid;
}

// Flags shared by every model-driven subcommand.
struct ModelFlags {
    std::string theta = "pi";
    double lambda = 1.0;
    double omega = 0.0;

    void attach(CLI::App* app) {
        app->add_option("--theta", theta, "Collision angle: pi, pi/2, pi/3, 2pi/3 or a decimal (radians)")
            ->capture_default_str();
        app->add_option("--lambda", lambda, "Collision rate; lambda = 1 fixes the time unit")->capture_default_str();
        app->add_option("--omega", omega, "Qubit frequency")->capture_default_str();
    }

    ModelParams make(const AncillaCount& n) const {
        if (!(lambda > 0.0)) throw UsageError("--lambda must be positive");
        return ModelParams(parse_angle(theta), lambda, omega, n);
    }
};

struct RunContext {
    std::vector<std::string> argv;
    std::ostream& out;
    Clock::time_point started = Clock::now();
};

void finish(RunContext& ctx, RunManifest& manifest, const std::string& output) {
    manifest.argv = ctx.argv;
    manifest.version = artifact_version();
    manifest.started = ctx.started;
    manifest.add_output(output);
    manifest.finished = Clock::now();
    const std::string path = manifest_path_for(output);
    manifest.write(path);
    ctx.out << "wrote " << output << " and " << path << '\n';
}

// ---------------------------------------------------------------- coherence

struct CoherenceFlags {
    ModelFlags model;
    std::string n = "inf";
    std::string mode = "analytic";
    double t_max = 10.0;
    std::size_t points = 501;
    std::uint64_t trajectories = 100000;
    std::uint64_t seed = 0;
    unsigned threads = 0;
    std::string out = "coherence.csv";
};

void cmd_coherence(const CoherenceFlags& f, RunContext& ctx) {
    if (f.mode != "analytic" && f.mode != "mc" && f.mode != "gksl") {
        throw UsageError("--mode must be analytic, mc or gksl");
    }
    const ModelParams params = f.model.make(parse_ancilla_count(f.n));
    if (f.mode == "gksl" && params.n().is_finite()) {
        throw UsageError("gksl mode integrates the master equation of the infinite reservoir; use --n inf");
    }
    const auto grid = uniform_grid(f.t_max, f.points);

    std::optional<stochastic::TrajectoryBatchResult> mc;
    if (f.mode == "mc") {
        if (f.trajectories == 0) throw UsageError("--trajectories must be positive");
        mc = stochastic::estimate_coherence({params, grid, f.trajectories, f.seed, f.threads, std::nullopt});
    }
    std::vector<double> numeric;
    if (f.mode == "gksl") {
        const auto plus = qcore::projector(qcore::QubitLabel::system(), qcore::ket_plus());
        const auto states = collision::integrate_gksl(plus, params, grid);
        for (std::size_t j = 0; j < grid.size(); ++j) {
            // strip the free phase so the column is comparable with c_analytic
            const qcore::Complex c = 2.0 * states[j].data()(0, 1) * std::polar(1.0, params.omega() * grid[j]);
            numeric.push_back(c.real());
        }
    }

    CsvWriter csv(f.out, {"t", "c_analytic", "c_mc_mean", "c_mc_stderr", "n_collisions_mean"});
    for (std::size_t j = 0; j < grid.size(); ++j) {
        auto row = csv.row();
        row.add(grid[j]).add(analytic::coherence_factor(params, grid[j]));
        if (mc) {
            const auto& p = mc->points[j];
            // the free phase is removed here as well: the column holds <cos^N theta>
            row.add((p.mean_coherence * std::polar(1.0, params.omega() * grid[j])).real())
                .add(p.std_error)
                .add(p.mean_collision_count);
        } else if (!numeric.empty()) {
            row.add(numeric[j]).empty().empty();
        } else {
            row.empty().empty().empty();
        }
        row.end();
    }
    csv.close();

    RunManifest manifest;
    manifest.command = "coherence";
    manifest.params = params;
    manifest.seed = f.seed;
    manifest.metadata["mode"] = f.mode;
    manifest.metadata["t_max"] = f.t_max;
    manifest.metadata["points"] = f.points;
    if (f.mode == "mc") manifest.metadata["trajectories"] = f.trajectories;
    if (params.n().is_finite() && params.is_non_entangling()) manifest.metadata["t_m"] = analytic::mixture_time(params);
    finish(ctx, manifest, f.out);
}

// ---------------------------------------------------------------- darwinism

struct DarwinismFlags {
    ModelFlags model;
    std::string setting = "emitters";
    std::uint64_t n = 10000;
    std::string times;
    std::string times_tm = "0.1,0.5,1,2,3";
    std::size_t fractions = 200;
    bool oracle = false;
    std::string out = "darwinism.csv";
};

void cmd_darwinism(const DarwinismFlags& f, RunContext& ctx) {
    const auto setting = analytic::parse_setting(f.setting);
    if (f.n == 0) throw UsageError("--n must be positive");
    const ModelParams params = f.model.make(AncillaCount::finite(f.n));
    if (!params.is_non_entangling()) {
        throw UsageError("mutual-information curves are only available for the non-entangling angle --theta pi");
    }
    if (f.oracle && f.n > oracle::kMaxAncillae) {
        throw CapacityError("--oracle supports n <= " + std::to_string(oracle::kMaxAncillae));
    }
    if (f.fractions == 0) throw UsageError("--fractions must be positive");

    const double t_m = analytic::mixture_time(params);
    std::vector<double> times;
    if (!f.times.empty()) {
        for (const auto& s : split_list(f.times)) times.push_back(parse_number(s, "time"));
    } else {
        for (const auto& s : split_list(f.times_tm)) times.push_back(parse_number(s, "time multiple") * t_m);
    }
    for (double t : times) {
        if (!(t >= 0.0)) throw UsageError("times must be non-negative");
    }
    const auto fractions = analytic::uniform_fractions(f.fractions);

    std::vector<std::string> header = {"setting", "t", "f", "k", "i_f_bits", "h_s_bits", "ratio"};
    if (f.oracle) header.push_back("i_f_oracle_bits");
    CsvWriter csv(f.out, header);
    for (double t : times) {
        const auto curve = analytic::mi_curve(params, t, setting, fractions);
        std::map<std::uint64_t, double> oracle_by_k;
        if (f.oracle) {
            if (setting == analytic::Setting::AncillaeOnly) {
                const auto state = oracle::build_state_ancillae(params, t);
                for (const auto& p : curve.points) {
                    if (!oracle_by_k.contains(p.k)) {
                        oracle_by_k[p.k] = oracle::mi_bruteforce(state, oracle::leading_units(f.n - p.k, setting));
                    }
                }
            } else {
                const auto state = oracle::build_state_emitters(params, t);
                for (const auto& p : curve.points) {
                    if (!oracle_by_k.contains(p.k)) {
                        oracle_by_k[p.k] = oracle::mi_bruteforce(state, oracle::leading_units(f.n - p.k, setting));
                    }
                }
            }
        }
        for (const auto& p : curve.points) {
            auto row = csv.row();
            row.add(analytic::to_string(setting)).add(t).add(p.f).add(p.k).add(p.i_f).add(curve.h_system);
            if (curve.h_system >= 1e-9) {
                row.add(p.i_f / curve.h_system);
            } else {
                row.empty();
            }
            if (f.oracle) row.add(oracle_by_k.at(p.k));
            row.end();
        }
    }
    csv.close();

    RunManifest manifest;
    manifest.command = "darwinism";
    manifest.params = params;
    manifest.metadata["setting"] = analytic::to_string(setting);
    manifest.metadata["t_m"] = t_m;
    manifest.metadata["times"] = times;
    manifest.metadata["fraction_intervals"] = f.fractions;
    manifest.metadata["oracle"] = f.oracle;
    finish(ctx, manifest, f.out);
}

// ---------------------------------------------------------------- nonmarkov

struct NonMarkovFlags {
    ModelFlags model;
    std::string n = "1,10,100,1000";
    double t_max = 0.0;
    double rate = 100.0;
    std::string out = "nonmarkov.csv";
};

void cmd_nonmarkov(const NonMarkovFlags& f, RunContext& ctx) {
    if (!(f.rate >= 100.0)) throw UsageError("--rate must be at least 100 samples per unit 1/lambda");
    std::vector<ModelParams> rows;
    for (const auto& s : split_list(f.n)) {
        const AncillaCount n = parse_ancilla_count(s);
        if (!n.is_finite()) {
            throw UsageError("the infinite reservoir is Markovian (BLP = 0); use `validate` for that check");
        }
        rows.push_back(f.model.make(n));
    }

    CsvWriter csv(f.out, {"n", "theta", "lambda", "t_m", "blp"});
    std::vector<double> horizons;
    for (const auto& params : rows) {
        const double n = static_cast<double>(params.n().value());
        // |c| relaxes to |cos theta|^n on the scale n / lambda
        const double t_max = f.t_max > 0.0 ? f.t_max : std::max(30.0 * n, 20.0) / params.lambda();
        horizons.push_back(t_max);
        auto row = csv.row();
        row.add(params.n().value()).add(params.theta()).add(params.lambda());
        if (params.is_non_entangling()) {
            row.add(analytic::mixture_time(params));
        } else {
            row.empty();
        }
        row.add(analysis::blp_of_model(params, t_max, f.rate));
        row.end();
    }
    csv.close();

    RunManifest manifest;
    manifest.command = "nonmarkov";
    manifest.params = rows.front();
    manifest.metadata["n"] = f.n;
    manifest.metadata["t_max"] = horizons;
    manifest.metadata["samples_per_unit"] = f.rate;
    finish(ctx, manifest, f.out);
}

// ---------------------------------------------------------------- validate

struct ValidateFlags {
    bool quick = false;
    std::uint64_t seed = 0;
    unsigned threads = 0;
    std::string report;
};

int cmd_validate(const ValidateFlags& f, RunContext& ctx, std::ostream& err) {
    ValidateOptions opts;
    opts.quick = f.quick;
    opts.seed = f.seed;
    opts.workers = f.threads;
    const auto results = run_validation(opts);
    const auto report = validation_report(results, opts);
    if (f.report.empty()) {
        ctx.out << report.dump(2) << '\n';
    } else {
        std::ofstream file(f.report, std::ios::trunc);
        if (!file) throw Error("cannot open " + f.report + " for writing");
        file << report.dump(2) << '\n';
        ctx.out << "wrote " << f.report << '\n';
    }
    bool ok = true;
    for (const auto& r : results) {
        if (!r.passed) {
            err << "FAILED check: " << r.name << " (measured " << format_double(r.measured) << ", threshold "
                << format_double(r.threshold) << ")\n";
            ok = false;
        }
    }
    return ok ? kExitOk : kExitFailure;
}

} // namespace

double parse_angle(const std::string& raw) {
    std::string text;
    for (char c : raw) {
        if (!std::isspace(static_cast<unsigned char>(c))) text += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    if (text.empty()) throw UsageError("empty angle");
    const auto slash = text.find('/');
    std::string num = text.substr(0, slash);
    double den = 1.0;
    if (slash != std::string::npos) {
        den = parse_number(text.substr(slash + 1), "angle denominator");
        if (den == 0.0) throw UsageError("angle denominator is zero");
    }
    double value;
    const auto pi_pos = num.find("pi");
    if (pi_pos != std::string::npos) {
        if (pi_pos + 2 != num.size()) throw UsageError("invalid angle '" + raw + "'");
        std::string coef = num.substr(0, pi_pos);
        if (!coef.empty() && coef.back() == '*') coef.pop_back();
        double k = 1.0;
        if (coef == "-") {
            k = -1.0;
        } else if (coef == "+") {
            k = 1.0;
        } else if (!coef.empty()) {
            k = parse_number(coef, "angle coefficient");
        }
        value = k * std::numbers::pi;
    } else {
        value = parse_number(num, "angle");
    }
    return value / den;
}

AncillaCount parse_ancilla_count(const std::string& text) {
    if (text == "inf" || text == "infinite" || text == "infinity") return AncillaCount::infinite();
    if (text.empty() || !std::all_of(text.begin(), text.end(), [](unsigned char c) { return std::isdigit(c); })) {
        throw UsageError("ancilla count must be a positive integer or 'inf', got '" + text + "'");
    }
    std::uint64_t n = 0;
    try {
        n = std::stoull(text);
    } catch (const std::exception&) {
        throw UsageError("ancilla count out of range: '" + text + "'");
    }
    if (n == 0) throw UsageError("ancilla count must be at least 1");
    return AncillaCount::finite(n);
}

std::uint64_t default_seed() {
    if (const char* env = std::getenv(kSeedEnv); env != nullptr && *env != '\0') {
        char* end = nullptr;
        const unsigned long long v = std::strtoull(env, &end, 10);
        if (*end == '\0') return v;
    }
    return 20190601;
}

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Stochastic collision-model dephasing: coherence, non-Markovianity and Darwinism curves"};
    app.name(args.empty() ? "dynmix_run" : args.front());
    app.require_subcommand(1);

    CoherenceFlags coh;
    auto* c = app.add_subcommand("coherence", "Coherence factor vs time (analytic, Monte-Carlo or GKSL)");
    coh.model.attach(c);
    coh.seed = default_seed();
    c->add_option("--n", coh.n, "Number of ancillae or 'inf'")->capture_default_str();
    c->add_option("--mode", coh.mode, "analytic | mc | gksl")->capture_default_str();
    c->add_option("--t-max", coh.t_max, "Final time")->capture_default_str();
    c->add_option("--points", coh.points, "Number of grid times")->capture_default_str();
    c->add_option("--trajectories", coh.trajectories, "Monte-Carlo trajectories")->capture_default_str();
    c->add_option("--seed", coh.seed, "Monte-Carlo seed (default from $DYNMIX_SEED)")->capture_default_str();
    c->add_option("--threads", coh.threads, "Worker threads (0 = all cores)")->capture_default_str();
    c->add_option("--out", coh.out, "Output CSV path")->capture_default_str();

    DarwinismFlags dar;
    auto* d = app.add_subcommand("darwinism", "Mutual information I_f vs environment fraction f");
    dar.model.attach(d);
    d->add_option("--setting", dar.setting, "ancillae | emitters")->capture_default_str();
    d->add_option("--n", dar.n, "Number of ancillae")->capture_default_str();
    auto* abs_times = d->add_option("--times", dar.times, "Comma-separated absolute times");
    d->add_option("--times-tm", dar.times_tm, "Comma-separated multiples of the mixture time")
        ->capture_default_str()
        ->excludes(abs_times);
    d->add_option("--fractions", dar.fractions, "Number of f intervals on [0, 1]")->capture_default_str();
    d->add_flag("--oracle", dar.oracle, "Add the brute-force oracle column (n <= 10)");
    d->add_option("--out", dar.out, "Output CSV path")->capture_default_str();

    NonMarkovFlags nm;
    auto* m = app.add_subcommand("nonmarkov", "BLP information back-flow for finite reservoirs");
    nm.model.attach(m);
    m->add_option("--n", nm.n, "Comma-separated ancilla counts")->capture_default_str();
    m->add_option("--t-max", nm.t_max, "Horizon (default 30 n / lambda, at least 20 / lambda)");
    m->add_option("--rate", nm.rate, "Samples per unit 1/lambda (>= 100)")->capture_default_str();
    m->add_option("--out", nm.out, "Output CSV path")->capture_default_str();

    ValidateFlags val;
    val.seed = default_seed();
    auto* v = app.add_subcommand("validate", "Run the cross-validation matrix and print a JSON report");
    v->add_flag("--quick", val.quick, "Closed-form checks only");
    v->add_option("--seed", val.seed, "Monte-Carlo seed (default from $DYNMIX_SEED)")->capture_default_str();
    v->add_option("--threads", val.threads, "Worker threads (0 = all cores)")->capture_default_str();
    v->add_option("--report", val.report, "Write the JSON report here instead of stdout");

    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << '\n' << app.help();
        return kExitUsage;
    }

    RunContext ctx{std::vector<std::string>(args.begin(), args.end()), out};
    try {
        if (c->parsed()) cmd_coherence(coh, ctx);
        if (d->parsed()) cmd_darwinism(dar, ctx);
        if (m->parsed()) cmd_nonmarkov(nm, ctx);
        if (v->parsed()) return cmd_validate(val, ctx, err);
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitOk;
}

} // namespace dynmix::cli
