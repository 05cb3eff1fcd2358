#include "crimereg/pipeline.hpp"

#include "crimereg/concentration.hpp"
#include "crimereg/csv.hpp"
#include "crimereg/error.hpp"
#include "crimereg/independence.hpp"
#include "crimereg/ingest.hpp"
#include "crimereg/rankdyn.hpp"
#include "crimereg/rhythms.hpp"
#include "crimereg/rng.hpp"
#include "crimereg/synth.hpp"
#include "crimereg/tessellate.hpp"

#include <json.hpp>

#include <array>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>

#ifndef CRIMEREG_VERSION
#define CRIMEREG_VERSION "0.0.0"
#endif

namespace crimereg {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

constexpr std::array<std::pair<Command, std::string_view>, 8> kCommands{{
    {Command::tessellate, "tessellate"},
    {Command::concentrate, "concentrate"},
    {Command::ranks, "ranks"},
    {Command::rhythms, "rhythms"},
    {Command::composed, "composed"},
    {Command::independence, "independence"},
    {Command::simulate, "simulate"},
    {Command::report, "report"},
}};

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h = 0xcbf29ce484222325ULL) {
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

json file_entry(const fs::path& path) {
    return {{"file", path.filename().string()}, {"bytes", fs::file_size(path)}, {"fnv1a64", file_checksum(path)}};
}

/// Files written by one run, removed again if the run fails.
class ArtifactSet {
public:
    explicit ArtifactSet(fs::path dir) : dir_(std::move(dir)) {}

    void write(const std::string& name, const std::function<void(std::ostream&)>& body) {
        const fs::path path = dir_ / name;
        written_.push_back(path);
        std::ofstream out(path, std::ios::binary);
        if (!out) throw Error("cli", "cannot write " + path.string());
        body(out);
        out.flush();
        if (!out) throw Error("cli", "failed writing " + path.string());
    }

    void write_json(const std::string& name, const json& j) {
        write(name, [&](std::ostream& o) { o << j.dump(2) << '\n'; });
    }

    json entries() const {
        json out = json::object();
        for (const auto& p : written_) out[p.filename().string()] = file_entry(p);
        return out;
    }

    void rollback() noexcept {
        for (const auto& p : written_) {
            std::error_code ec;
            fs::remove(p, ec);
        }
        written_.clear();
    }

    const fs::path& dir() const { return dir_; }

private:
    fs::path dir_;
    std::vector<fs::path> written_;
};

struct Run {
    Run(const RunConfig& c) : cfg(c), files(c.out) {}

    const RunConfig& cfg;
    ArtifactSet files;
    json inputs = json::object();
    json outputs_summary = json::object();
    std::vector<std::string> warnings;

    void warn(std::string message) {
        std::cerr << "warning: " << message << '\n';
        warnings.push_back(std::move(message));
    }

    const fs::path& need(const std::optional<fs::path>& p, std::string_view flag) const {
        if (!p) throw Error("cli", std::string(to_string(cfg.command)) + " requires --" + std::string(flag));
        return *p;
    }

    void input(std::string_view key, const fs::path& path) {
        if (!fs::is_regular_file(path)) throw Error("cli", "input not found: " + path.string());
        inputs[std::string(key)] = file_entry(path);
    }
};

json parameters(const RunConfig& c) {
    json p;
    p["target_pop"] = c.target_pop ? json(*c.target_pop) : json(nullptr);
    p["category"] = c.category ? json(*c.category) : json(nullptr);
    p["week_origin"] = c.week_origin ? json(format_date(*c.week_origin)) : json(nullptr);
    p["dedup"] = c.dedup;
    p["region"] = c.region ? json(*c.region) : json(nullptr);
    p["band"] = {c.band.lo, c.band.hi};
    p["alpha_level"] = c.alpha_level;
    p["boot"] = c.boot;
    p["perm"] = c.perm;
    p["seed"] = c.seed;
    p["workers"] = c.workers;
    return p;
}

void validate(const RunConfig& c) {
    if (!(c.alpha_level > 0.0 && c.alpha_level < 1.0)) throw Error("cli", "--alpha-level must lie in (0, 1)");
    if (!(c.band.lo >= 0.0 && c.band.hi > c.band.lo)) throw Error("cli", "--band needs 0 <= lo < hi");
    if (c.boot != 0 && c.boot < 100) throw Error("cli", "--boot must be 0 (skip) or at least 100");
    if (c.perm < 999) throw Error("cli", "--perm must be at least 999");
    if (c.workers < 1) throw Error("cli", "--workers must be at least 1");
    if (c.target_pop && !(*c.target_pop > 0.0)) throw Error("cli", "--target-pop must be positive");
}

EventTable load_events(Run& run) {
    const auto& path = run.need(run.cfg.events, "events");
    run.input("events", path);
    auto parsed = parse_events(path);
    if (!parsed.rejections.empty()) {
        run.warn(std::to_string(parsed.rejections.size()) + " event rows rejected, see events.rejects.csv");
        run.files.write("events.rejects.csv", [&](std::ostream& o) { write_rejections(parsed.rejections, o); });
    }
    EventFilter filter;
    filter.category = run.cfg.category;
    auto table = filter_events(parsed.table, filter);
    if (run.cfg.dedup) table = deduplicate(table);
    if (table.empty()) throw Error("ingest", "no events left after filtering");
    return table;
}

Tessellation load_tessellation(Run& run) {
    const auto& path = run.need(run.cfg.population, "population");
    if (!run.cfg.target_pop) throw Error("cli", std::string(to_string(run.cfg.command)) + " requires --target-pop");
    run.input("population", path);
    const auto cells = parse_population(path);
    auto tess = build_tessellation(cells, *run.cfg.target_pop);
    for (const auto& w : tess.warnings) run.warn(w);
    return tess;
}

struct RegionData {
    RegionSeriesSet series;
    std::vector<std::int64_t> totals;
};

std::int64_t to_count(double v, std::string_view what) {
    if (!std::isfinite(v) || v < 0.0 || v != std::floor(v))
        throw Error("concentration", std::string(what) + " is not a non-negative integer count");
    return static_cast<std::int64_t>(v);
}

/// Weekly region series from --series, or from --events/--population/--target-pop.
RegionData load_regions(Run& run) {
    RegionData d;
    if (run.cfg.series) {
        run.input("series", *run.cfg.series);
        d.series = read_region_series(*run.cfg.series);
        for (Eigen::Index i = 0; i < d.series.regions(); ++i) {
            double sum = 0.0;
            for (Eigen::Index t = 0; t < d.series.weeks(); ++t) {
                if (!std::isnan(d.series.counts(t, i))) sum += d.series.counts(t, i);
            }
            d.totals.push_back(std::llround(sum));
        }
        return d;
    }
    if (!run.cfg.events || !run.cfg.population)
        throw Error("cli", std::string(to_string(run.cfg.command)) +
                               " requires --series, or --events with --population and --target-pop");
    const auto events = load_events(run);
    const auto tess = load_tessellation(run);
    d.series = build_region_series(events, tess, run.cfg.week_origin);
    d.totals = assign_events(events, tess).counts;
    return d;
}

std::vector<std::int64_t> read_counts(const fs::path& path) {
    const auto table = csv::read(path);
    const auto c_count = table.require("count", path.string());
    const auto c_id = table.column("region_id");
    std::vector<std::int64_t> out;
    for (const auto& row : table.rows) {
        if (c_id && *c_id < row.fields.size() && row.fields[*c_id] == "outside") continue;
        const auto where = path.string() + " line " + std::to_string(row.line);
        const auto v = c_count < row.fields.size() ? csv::to_double(row.fields[c_count]) : std::nullopt;
        if (!v) throw Error("concentration", where + ": bad count");
        out.push_back(to_count(*v, where));
    }
    return out;
}

void cmd_tessellate(Run& run) {
    const auto tess = load_tessellation(run);
    run.files.write("tessellation.csv", [&](std::ostream& o) { write_tessellation(tess, o); });
    run.outputs_summary["regions"] = tess.size();
    if (!run.cfg.events) return;
    const auto events = load_events(run);
    const auto counts = assign_events(events, tess);
    if (counts.outside > 0) run.warn(std::to_string(counts.outside) + " events fall outside the tessellation");
    run.files.write("region_counts.csv", [&](std::ostream& o) { write_region_counts(counts, o); });
    const auto series = build_region_series(events, tess, run.cfg.week_origin);
    run.files.write("region_series.csv", [&](std::ostream& o) { write_region_series(series, o); });
    run.outputs_summary["events"] = events.size();
    run.outputs_summary["weeks"] = series.weeks();
}

json lr_json(const LikelihoodRatioResult& r) {
    return {{"stat", r.statistic},
            {"p", r.p_value},
            {"favored", std::string(to_string(r.favored))},
            {"parameters", r.alternative_parameters}};
}

void cmd_concentrate(Run& run) {
    std::vector<std::int64_t> counts;
    if (run.cfg.counts) {
        run.input("counts", *run.cfg.counts);
        counts = read_counts(*run.cfg.counts);
    } else {
        counts = load_regions(run).totals;
    }
    const auto curve = lorenz(counts);
    run.files.write("lorenz.csv", [&](std::ostream& o) { write_lorenz(curve, o); });
    const auto fit = fit_power_law(counts);
    if (!fit.valid()) run.warn("power-law fit has fewer than 10 tail observations");
    const auto lr_exp = likelihood_ratio(counts, fit, Alternative::exponential, run.cfg.alpha_level);
    const auto lr_log = likelihood_ratio(counts, fit, Alternative::lognormal, run.cfg.alpha_level);
    json gof = nullptr;
    if (run.cfg.boot > 0) gof = gof_bootstrap(counts, fit, run.cfg.boot, run.cfg.seed, run.cfg.workers);

    json j;
    j["alpha"] = fit.alpha;
    j["xmin"] = fit.xmin;
    j["ks"] = fit.ks_statistic;
    j["n_tail"] = fit.n_tail;
    j["gini"] = curve.gini;
    j["lr_exponential"] = lr_json(lr_exp);
    j["lr_lognormal"] = lr_json(lr_log);
    j["gof_p"] = gof;
    j["alpha_se"] = fit.standard_error();
    j["n"] = counts.size();
    j["n_boot"] = run.cfg.boot;
    run.files.write_json("fit.json", j);
}

void cmd_ranks(Run& run) {
    const auto data = load_regions(run);
    const auto profile = position_entropy(weekly_ranks(data.series));
    run.files.write("entropy.csv", [&](std::ostream& o) { write_entropy(profile, o); });
    json j;
    j["mean_h"] = profile.mean_h;
    std::vector<double> top(profile.h.data(), profile.h.data() + std::min<Eigen::Index>(10, profile.h.size()));
    j["h_top10"] = top;
    j["top_decile_spearman"] =
        profile.h.size() >= 10 ? json(entropy_vs_rank_shape(profile).spearman) : json(nullptr);
    j["regions"] = data.series.regions();
    j["weeks"] = data.series.weeks();
    run.files.write_json("entropy.json", j);
}

SignificanceOptions significance_options(const RunConfig& c) {
    SignificanceOptions o;
    o.alpha_level = c.alpha_level;
    return o;
}

void cmd_rhythms(Run& run) {
    const auto data = load_regions(run);
    const auto& set = data.series;
    TimeSeries<double> y;
    std::string target = "city";
    if (run.cfg.region) {
        const auto it = std::find(set.region_ids.begin(), set.region_ids.end(), *run.cfg.region);
        if (it == set.region_ids.end()) throw Error("cli", "--region " + std::to_string(*run.cfg.region) + " not in series");
        y.values = set.counts.col(it - set.region_ids.begin());
        target = "region_" + std::to_string(*run.cfg.region);
    } else {
        y.values = set.city;
    }
    if (!set.week_starts.empty()) y.t0 = set.week_starts.front();
    const auto a = analyze_series(y, run.cfg.band, significance_options(run.cfg));

    run.files.write("spectrum.csv", [&](std::ostream& o) {
        o << "scale_years,power,significance\n";
        for (Eigen::Index j = 0; j < a.global.scales.size(); ++j) {
            o << csv::format(a.global.scales(j)) << ',' << csv::format(a.global.power(j)) << ','
              << csv::format(a.global.significance(j)) << '\n';
        }
    });
    run.files.write("band.csv", [&](std::ostream& o) {
        o << "week_start,power,threshold,significant,coi_valid\n";
        for (Eigen::Index t = 0; t < a.band.series.size(); ++t) {
            o << format_date(set.week_starts[static_cast<std::size_t>(t)]) << ',' << csv::format(a.band.series(t))
              << ',' << csv::format(a.band.threshold) << ',' << int(a.band.significant(t)) << ','
              << int(a.band.coi_valid(t)) << '\n';
        }
    });
    const auto recon = reconstruct_band(a.field, run.cfg.band, y.t0);
    run.files.write("reconstruction.csv", [&](std::ostream& o) {
        o << "week_start,detrended,band\n";
        for (Eigen::Index t = 0; t < recon.size(); ++t) {
            o << format_date(set.week_starts[static_cast<std::size_t>(t)]) << ','
              << csv::format(a.detrended.values(t)) << ',' << csv::format(recon.values(t)) << '\n';
        }
    });

    json peaks = json::array();
    for (auto j : a.global.peak_scales) peaks.push_back(a.global.periods(j));
    json j;
    j["series"] = target;
    j["band"] = {run.cfg.band.lo, run.cfg.band.hi};
    j["band_significant_fraction"] = a.band.significant_fraction();
    j["band_significant_global"] = a.global.significant_in(run.cfg.band);
    j["band_threshold"] = a.band.threshold;
    j["band_dof"] = a.band.dof;
    j["coi_valid_weeks"] = a.band.coi_valid.count();
    j["lag1_observed"] = a.band.null.observed_lag1;
    j["lag1_null"] = a.band.null.lag1;
    j["global_peak_periods_years"] = peaks;
    run.files.write_json("rhythms.json", j);
}

void cmd_composed(Run& run) {
    const auto data = load_regions(run);
    const auto& set = data.series;
    const auto c = composed_power(set, run.cfg.band, significance_options(run.cfg), run.cfg.workers);
    const auto runs = significant_durations(c);

    run.files.write("composed.csv", [&](std::ostream& o) {
        o << "week_start,c_b,regions_valid\n";
        for (Eigen::Index t = 0; t < c.c_b.size(); ++t) {
            o << format_date(set.week_starts[static_cast<std::size_t>(t)]) << ',' << c.c_b(t) << ','
              << c.regions_valid << '\n';
        }
    });
    run.files.write("durations.csv", [&](std::ostream& o) {
        o << "region_id,run_start,run_length_weeks\n";
        for (const auto& r : runs) {
            o << r.region_id << ',' << format_date(set.week_starts[static_cast<std::size_t>(r.start)]) << ','
              << r.length << '\n';
        }
    });

    json rejected = json::array();
    for (std::size_t i = 0; i < c.region_ids.size(); ++i) {
        if (c.region_valid[i]) continue;
        run.warn("region " + std::to_string(c.region_ids[i]) + " rejected: " + c.region_error[i]);
        rejected.push_back({{"region_id", c.region_ids[i]}, {"reason", c.region_error[i]}});
    }
    json j;
    j["c_b_cv"] = c.coi_interior_cv();
    j["median_dt"] = median_duration(runs);
    j["runs"] = runs.size();
    j["regions_valid"] = c.regions_valid;
    j["regions_total"] = c.region_ids.size();
    j["coi_valid_weeks"] = c.coi_valid.count();
    j["rejected_regions"] = rejected;
    run.files.write_json("composed.json", j);
}

void cmd_independence(Run& run) {
    const auto& path = run.need(run.cfg.pairs, "pairs");
    run.input("pairs", path);
    const auto sample = read_paired_sample(path);
    const auto t = hoeffding_test(sample, run.cfg.perm, run.cfg.seed, run.cfg.alpha_level, run.cfg.workers);
    json j;
    j["D"] = t.d;
    j["p_value"] = t.p_value;
    j["n"] = t.n;
    j["n_perm"] = t.n_perm;
    j["decision"] = t.reject ? "reject_independence" : "retain_independence";
    j["alpha_level"] = run.cfg.alpha_level;
    run.files.write_json("independence.json", j);
}

/// Reads typed scenario parameters, rejecting names the kind does not know.
class ScenarioParams {
public:
    ScenarioParams(const nlohmann::json& given, std::string kind) : given_(given), kind_(std::move(kind)) {
        if (!given_.is_object()) throw Error("synth", "scenario 'parameters' must be an object");
    }

    double number(const std::string& key, double fallback) {
        used_.insert(key);
        double v = fallback;
        if (given_.contains(key)) {
            if (!given_[key].is_number()) throw Error("synth", "parameter '" + key + "' must be a number");
            v = given_[key].get<double>();
        }
        resolved_[key] = v;
        return v;
    }

    std::int64_t integer(const std::string& key, std::int64_t fallback) {
        used_.insert(key);
        std::int64_t v = fallback;
        if (given_.contains(key)) {
            const auto& x = given_[key];
            if (!x.is_number_integer() && !(x.is_number() && x.get<double>() == std::floor(x.get<double>())))
                throw Error("synth", "parameter '" + key + "' must be an integer");
            v = x.is_number_integer() ? x.get<std::int64_t>() : static_cast<std::int64_t>(x.get<double>());
        }
        resolved_[key] = v;
        return v;
    }

    std::string text(const std::string& key, const std::string& fallback) {
        used_.insert(key);
        std::string v = fallback;
        if (given_.contains(key)) {
            if (!given_[key].is_string()) throw Error("synth", "parameter '" + key + "' must be a string");
            v = given_[key].get<std::string>();
        }
        resolved_[key] = v;
        return v;
    }

    /// Throws on any parameter that was given but never read.
    json finish() const {
        for (const auto& [key, _] : given_.items()) {
            if (!used_.contains(key)) throw Error("synth", "unknown parameter '" + key + "' for kind " + kind_);
        }
        return resolved_;
    }

private:
    const nlohmann::json& given_;
    std::string kind_;
    std::set<std::string> used_;
    json resolved_ = json::object();
};

Date parse_start(const std::string& text) {
    const auto d = parse_date(text);
    if (!d) throw Error("synth", "bad start_date '" + text + "'");
    return *d;
}

RegionSeriesSet single_series(const TimeSeries<double>& y, Date start) {
    RegionSeriesSet set;
    set.counts.resize(y.size(), 0);
    set.city = y.values;
    for (Eigen::Index t = 0; t < y.size(); ++t) set.week_starts.push_back(start + std::chrono::days{7 * t});
    return set;
}

void cmd_simulate(Run& run) {
    const auto& path = run.need(run.cfg.scenario, "scenario");
    run.input("scenario", path);
    std::ifstream in(path);
    nlohmann::json scenario;
    try {
        in >> scenario;
    } catch (const nlohmann::json::exception& e) {
        throw Error("synth", path.string() + ": " + e.what());
    }
    if (!scenario.is_object() || !scenario.contains("kind") || !scenario["kind"].is_string())
        throw Error("synth", path.string() + ": scenario needs a string 'kind'");
    const std::string kind = scenario["kind"].get<std::string>();
    std::uint64_t seed = run.cfg.seed;
    if (scenario.contains("seed")) {
        if (!scenario["seed"].is_number_unsigned()) throw Error("synth", "'seed' must be a non-negative integer");
        seed = scenario["seed"].get<std::uint64_t>();
    }
    const nlohmann::json empty = nlohmann::json::object();
    ScenarioParams p(scenario.contains("parameters") ? scenario["parameters"] : empty, kind);

    auto positive_size = [](std::int64_t v, const char* name) {
        if (v < 1) throw Error("synth", std::string(name) + " must be at least 1");
        return static_cast<std::size_t>(v);
    };

    if (kind == "powerlaw_counts") {
        const double alpha = p.number("alpha", 2.5);
        const auto xmin = p.integer("xmin", 1);
        const auto n = positive_size(p.integer("n", 10000), "n");
        p.finish();
        const auto counts = gen_powerlaw_counts(alpha, xmin, n, seed);
        run.files.write("counts.csv", [&](std::ostream& o) {
            o << "region_id,count\n";
            for (std::size_t i = 0; i < counts.size(); ++i) o << i << ',' << counts[i] << '\n';
        });
    } else if (kind == "ar1" || kind == "seasonal") {
        TimeSeries<double> y;
        if (kind == "ar1") {
            const double a = p.number("a", 0.7);
            const auto n = positive_size(p.integer("n", 520), "n");
            y = gen_ar1(a, n, seed);
        } else {
            const double period = p.number("period_years", 1.0);
            const double amplitude = p.number("amplitude", 1.0);
            const double noise = p.number("noise_sd", 0.5);
            const auto n = positive_size(p.integer("n", 520), "n");
            y = gen_seasonal(period, amplitude, noise, n, seed);
        }
        const auto start = parse_start(p.text("start_date", "2010-01-04"));
        p.finish();
        const auto set = single_series(y, start);
        run.files.write("series.csv", [&](std::ostream& o) { write_region_series(set, o); });
    } else if (kind == "traveling_wave_city") {
        TravelingWaveParams tw;
        tw.regions = static_cast<int>(p.integer("R", tw.regions));
        tw.weeks = static_cast<int>(p.integer("N", tw.weeks));
        tw.window_weeks = static_cast<int>(p.integer("window_weeks", tw.window_weeks));
        tw.wave_speed = p.number("wave_speed_regions_per_year", tw.wave_speed);
        tw.amplitude = p.number("amplitude", tw.amplitude);
        tw.noise_sd = p.number("noise_sd", tw.noise_sd);
        tw.period_years = p.number("period_years", tw.period_years);
        p.finish();
        const auto set = gen_traveling_wave_city(tw, seed);
        run.files.write("region_series.csv", [&](std::ostream& o) { write_region_series(set, o); });
    } else if (kind == "event_city") {
        EventCityParams ec;
        ec.grid = static_cast<int>(p.integer("grid", ec.grid));
        ec.cell_size = p.number("cell_size", ec.cell_size);
        ec.origin_lon = p.number("origin_lon", ec.origin_lon);
        ec.origin_lat = p.number("origin_lat", ec.origin_lat);
        ec.weeks = static_cast<int>(p.integer("weeks", ec.weeks));
        ec.events_per_week = p.number("events_per_week", ec.events_per_week);
        ec.hotspot_alpha = p.number("hotspot_alpha", ec.hotspot_alpha);
        ec.seasonal_amplitude = p.number("seasonal_amplitude", ec.seasonal_amplitude);
        const auto start = parse_start(p.text("start_date", "2010-01-04"));
        ec.start_date_days = start.time_since_epoch().count();
        p.finish();
        const auto city = gen_event_city(ec, seed);
        run.files.write("events.csv", [&](std::ostream& o) { write_events(city.events, o); });
        run.files.write("population.csv", [&](std::ostream& o) { write_population(city.population, o); });
    } else {
        throw Error("synth", "unknown scenario kind '" + kind + "'");
    }

    json echo;
    echo["seed"] = seed;
    echo["kind"] = kind;
    echo["parameters"] = p.finish();
    echo["rng"] = Rng::algorithm;
    run.files.write_json("scenario.json", echo);
}

void cmd_report(Run& run) {
    const fs::path dir = run.cfg.artifacts.value_or(run.cfg.out);
    const std::array<std::string, 5> sources{"fit.json", "entropy.json", "rhythms.json", "composed.json",
                                             "independence.json"};
    std::map<std::string, nlohmann::json> found;
    json missing = json::array();
    for (const auto& name : sources) {
        const auto path = dir / name;
        if (!fs::is_regular_file(path)) {
            missing.push_back(name);
            continue;
        }
        std::ifstream in(path);
        try {
            found[name] = nlohmann::json::parse(in);
        } catch (const nlohmann::json::exception& e) {
            throw Error("cli", path.string() + ": " + e.what());
        }
        run.input(name, path);
    }
    if (found.empty()) {
        std::string list;
        for (const auto& m : missing) list += (list.empty() ? "" : ", ") + m.get<std::string>();
        throw Error("cli", "no upstream artifacts in " + dir.string() + "; missing: " + list);
    }
    auto pick = [&](const std::string& file, const std::string& key) -> json {
        const auto it = found.find(file);
        if (it == found.end() || !it->second.contains(key)) return nullptr;
        return it->second[key];
    };
    json j;
    j["gini"] = pick("fit.json", "gini");
    j["alpha"] = pick("fit.json", "alpha");
    j["xmin"] = pick("fit.json", "xmin");
    j["gof_p"] = pick("fit.json", "gof_p");
    j["mean_h"] = pick("entropy.json", "mean_h");
    j["h_top10"] = pick("entropy.json", "h_top10");
    j["city_band_significant_fraction"] = pick("rhythms.json", "band_significant_fraction");
    j["city_global_peak_periods_years"] = pick("rhythms.json", "global_peak_periods_years");
    j["c_b_cv"] = pick("composed.json", "c_b_cv");
    j["median_dt"] = pick("composed.json", "median_dt");
    j["regions_valid"] = pick("composed.json", "regions_valid");
    j["hoeffding_d"] = pick("independence.json", "D");
    j["hoeffding_p"] = pick("independence.json", "p_value");
    j["missing"] = missing;
    for (const auto& m : missing) run.warn("report: missing " + m.get<std::string>());
    run.files.write_json("report.json", j);
}

std::string now_utc() {
    return format_instant(std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now()));
}

void write_manifest(Run& run) {
    const fs::path path = run.cfg.out / "manifest.json";
    json manifest = json::object();
    if (fs::is_regular_file(path)) {
        std::ifstream in(path);
        manifest = json::parse(in, nullptr, false);
        if (manifest.is_discarded() || !manifest.is_object()) manifest = json::object();
    }
    json entry;
    entry["generated_at"] = now_utc();
    entry["inputs"] = run.inputs;
    entry["parameters"] = parameters(run.cfg);
    entry["versions"] = {{"crimereg", CRIMEREG_VERSION},
                         {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                                       "." + std::to_string(EIGEN_MINOR_VERSION)},
                         {"rng", Rng::algorithm}};
    entry["seeds"] = {{"seed", run.cfg.seed}};
    entry["artifacts"] = run.files.entries();
    entry["summary"] = run.outputs_summary;
    entry["warnings"] = run.warnings;
    manifest["runs"][std::string(to_string(run.cfg.command))] = entry;
    // Keep run entries in a stable order regardless of execution order.
    json runs = json::object();
    for (const auto& [cmd, name] : kCommands) {
        const std::string key(name);
        if (manifest["runs"].contains(key)) runs[key] = manifest["runs"][key];
    }
    manifest["runs"] = runs;
    std::ofstream out(path, std::ios::binary);
    out << manifest.dump(2) << '\n';
    if (!out) throw Error("cli", "failed writing " + path.string());
}

} // namespace

std::optional<Command> parse_command(std::string_view name) {
    for (const auto& [c, n] : kCommands) {
        if (n == name) return c;
    }
    return std::nullopt;
}

std::string_view to_string(Command c) {
    for (const auto& [k, n] : kCommands) {
        if (k == c) return n;
    }
    return "unknown";
}

std::string file_checksum(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cli", "cannot read " + path.string());
    std::uint64_t h = 0xcbf29ce484222325ULL;
    std::array<char, 1 << 16> buf{};
    while (in) {
        in.read(buf.data(), buf.size());
        h = fnv1a(std::string_view(buf.data(), static_cast<std::size_t>(in.gcount())), h);
    }
    return hex(h);
}

void run(const RunConfig& config) {
    validate(config);
    std::error_code ec;
    fs::create_directories(config.out, ec);
    if (ec || !fs::is_directory(config.out)) throw Error("cli", "cannot create output directory " + config.out.string());

    Run r(config);
    try {
        switch (config.command) {
        case Command::tessellate: cmd_tessellate(r); break;
        case Command::concentrate: cmd_concentrate(r); break;
        case Command::ranks: cmd_ranks(r); break;
        case Command::rhythms: cmd_rhythms(r); break;
        case Command::composed: cmd_composed(r); break;
        case Command::independence: cmd_independence(r); break;
        case Command::simulate: cmd_simulate(r); break;
        case Command::report: cmd_report(r); break;
        }
        write_manifest(r);
    } catch (...) {
        r.files.rollback();
        throw;
    }
}

} // namespace crimereg
