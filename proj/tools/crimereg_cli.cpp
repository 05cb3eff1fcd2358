// crimereg: spatial concentration and temporal rhythm analysis of point events.

#include "crimereg/error.hpp"
#include "crimereg/pipeline.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

constexpr int kUsageError = 2;

struct Options {
    std::string events, population, counts, series, pairs, scenario, artifacts, category, week_origin;
    std::string band = "0.8:1.1";
    double target_pop = 0.0;
    int region = -1;
};

std::optional<std::filesystem::path> path_or_none(const std::string& s) {
    if (s.empty()) return std::nullopt;
    return std::filesystem::path(s);
}

} // namespace

int main(int argc, char** argv) {
    using crimereg::Command;

    CLI::App app{"Spatial concentration and temporal rhythms of point events"};
    app.require_subcommand(1);
    app.fallthrough();

    crimereg::RunConfig cfg;
    Options o;
    std::string out = ".";
    app.add_option("--events", o.events, "Events CSV (timestamp,lon,lat,category)");
    app.add_option("--population", o.population, "Population CSV (lon,lat,population)");
    app.add_option("--target-pop", o.target_pop, "Target population per region");
    app.add_option("--category", o.category, "Keep only events of this category");
    app.add_option("--week-origin", o.week_origin, "Earliest date of the weekly grid (YYYY-MM-DD)");
    app.add_flag("--dedup", cfg.dedup, "Drop exact duplicate events");
    app.add_option("--counts", o.counts, "Per-region counts CSV with a `count` column");
    app.add_option("--series", o.series, "Wide weekly region series CSV");
    app.add_option("--pairs", o.pairs, "Paired sample CSV (label,x,y)");
    app.add_option("--scenario", o.scenario, "Synthetic scenario JSON");
    app.add_option("--artifacts", o.artifacts, "Directory read by `report` (default: --out)");
    app.add_option("--region", o.region, "Analyse this region instead of the city sum (rhythms)");
    app.add_option("--band", o.band, "Period band in years, lo:hi")->capture_default_str();
    app.add_option("--alpha-level", cfg.alpha_level, "Significance level")->capture_default_str();
    app.add_option("--boot", cfg.boot, "Goodness-of-fit bootstrap replicates (0 skips)")->capture_default_str();
    app.add_option("--perm", cfg.perm, "Permutations for the independence test")->capture_default_str();
    app.add_option("--seed", cfg.seed, "Random seed")->capture_default_str();
    app.add_option("--out", out, "Output directory")->capture_default_str();
    app.add_option("--workers", cfg.workers, "Maximum worker threads")->capture_default_str();

    const std::pair<Command, const char*> commands[] = {
        {Command::tessellate, "Equal-population regions, region counts and weekly series"},
        {Command::concentrate, "Lorenz curve, Gini and power-law fit with model comparison"},
        {Command::ranks, "Weekly ranks and rank-position entropy"},
        {Command::rhythms, "Wavelet spectrum and circannual band power of one series"},
        {Command::composed, "Per-region band significance, composed power and durations"},
        {Command::independence, "Hoeffding independence test on paired values"},
        {Command::simulate, "Generate a synthetic dataset from a scenario"},
        {Command::report, "Summarise the artifacts of a run directory"},
    };
    for (const auto& [c, help] : commands) app.add_subcommand(std::string(crimereg::to_string(c)), help);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "usage: " << e.what() << "\n" << app.help();
        return kUsageError;
    }

    try {
        cfg.command = *crimereg::parse_command(app.get_subcommands().front()->get_name());
        cfg.out = out;
        cfg.events = path_or_none(o.events);
        cfg.population = path_or_none(o.population);
        cfg.counts = path_or_none(o.counts);
        cfg.series = path_or_none(o.series);
        cfg.pairs = path_or_none(o.pairs);
        cfg.scenario = path_or_none(o.scenario);
        cfg.artifacts = path_or_none(o.artifacts);
        if (app.count("--target-pop")) cfg.target_pop = o.target_pop;
        if (!o.category.empty()) cfg.category = o.category;
        if (app.count("--region")) cfg.region = o.region;
        if (!o.week_origin.empty()) {
            cfg.week_origin = crimereg::parse_date(o.week_origin);
            if (!cfg.week_origin) throw crimereg::Error("cli", "bad --week-origin '" + o.week_origin + "'");
        }
        cfg.band = crimereg::parse_band(o.band);
        crimereg::run(cfg);
    } catch (const crimereg::Error& e) {
        std::cerr << e.module() << ": " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
