// cachenet: experiment driver for the cache-network simulator and the
// characteristic-time analytics.
//
// Subcommands:
//   simulate   run a config through the event simulator, emit results.csv
//   analyze    solve the characteristic time, emit per-content predictions
//   classify   enumerate small policy instances, emit the classification report
//   reproduce  run a bundled figure recipe (fig5..fig8)
//
// Exit codes: 0 success, 2 configuration error, 3 runtime/model error.

#include <atomic>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "cachenet/experiment.hpp"

namespace fs = std::filesystem;
using namespace cachenet;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file(const fs::path& path, const std::string& content) {
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << content;
}

struct CommonOpts {
    std::string config_path;
    std::string out_dir = "out";
    std::optional<std::uint64_t> seed;
    std::optional<std::string> policy;
    std::optional<int> cache_size;
    int workers = 1;
};

Overrides to_overrides(const CommonOpts& o) {
    Overrides ov;
    ov.seed = o.seed;
    if (o.policy) ov.policy = detail::parse_policy(*o.policy, "--policy");
    ov.cache_size = o.cache_size;
    return ov;
}

void run_parallel(int jobs, int workers, const std::function<void(int)>& fn) {
    if (workers <= 1) {
        for (int i = 0; i < jobs; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < std::min(workers, jobs); ++w)
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < jobs; i = next.fetch_add(1)) fn(i);
        });
    for (auto& t : pool) t.join();
}

int cmd_simulate(const CommonOpts& opts) {
    ExperimentConfig cfg =
        apply_overrides(parse_config(read_file(opts.config_path)), to_overrides(opts));
    const Metrics metrics = run_experiment(cfg);
    const std::string id = fs::path(opts.config_path).stem().string();
    write_file(fs::path(opts.out_dir) / "results.csv", results_csv(cfg, metrics, id));
    for (std::size_t n = 0; n < cfg.topology.nodes.size(); ++n) {
        const auto& node = cfg.topology.nodes[n];
        if (node.is_publisher) continue;
        std::cout << "node=" << node.name << " policy=" << detail::policy_name(node.policy)
                  << " requests=" << metrics.node_requests(static_cast<int>(n))
                  << " hit_ratio=" << fmt_g9(metrics.node_hit_ratio(static_cast<int>(n)))
                  << '\n';
    }
    if (metrics.exogenous_requests == 0)
        std::cout << "warning: no post-warmup requests (horizon shorter than warmup?)\n";
    std::cout << "expiry_violations=" << metrics.expiry_violations << '\n';
    return 0;
}

int cmd_analyze(const CommonOpts& opts) {
    ExperimentConfig cfg =
        apply_overrides(parse_config(read_file(opts.config_path)), to_overrides(opts));
    const TopologyNode* node = analysis_node(cfg);
    if (node == nullptr) throw ConfigError("no non-publisher node with exogenous traffic");
    const PredictionSet pred = predict_for_node(cfg, *node);
    write_file(fs::path(opts.out_dir) / "predictions.csv", predictions_csv(cfg, pred, *node));
    write_file(fs::path(opts.out_dir) / "che_iterations.csv", iterations_csv(pred.solution));
    std::cout << "T=" << fmt_g9(pred.solution.T) << " iterations=" << pred.solution.iterations
              << " residual=" << fmt_g9(pred.solution.residual)
              << " converged=" << (pred.solution.converged ? "true" : "false") << '\n';
    return 0;
}

int cmd_classify(const std::string& out_dir, const std::vector<int>& catalog_sizes,
                 const std::vector<int>& cache_sizes) {
    const ClassificationReport rep = classification_report(catalog_sizes, cache_sizes);
    write_file(fs::path(out_dir) / "classification.txt", rep.text);
    write_file(fs::path(out_dir) / "witnesses.csv", rep.witnesses_csv);
    std::cout << rep.text;
    std::cout << "matches_expected=" << (rep.matches_expected ? "true" : "false") << '\n';
    return 0;
}

int cmd_reproduce(const std::string& figure, const CommonOpts& opts) {
    const fs::path out(opts.out_dir);
    if (figure == "fig5") {
        const ExperimentConfig cfg = fig_recipe(1000);
        const TopologyNode* node = analysis_node(cfg);
        const PredictionSet pred = predict_for_node(cfg, *node);
        write_file(out / "fig5_iterations.csv", iterations_csv(pred.solution));
        std::cout << "T=" << fmt_g9(pred.solution.T)
                  << " iterations=" << pred.solution.iterations
                  << " residual=" << fmt_g9(pred.solution.residual) << '\n';
        return 0;
    }
    static const std::map<std::string, int> capacities{
        {"fig6", 1000}, {"fig7", 500}, {"fig8", 100}};
    const auto it = capacities.find(figure);
    if (it == capacities.end())
        throw ConfigError("unknown figure '" + figure + "' (expected fig5..fig8)");
    const int capacity = it->second;
    const std::uint64_t base_seed = opts.seed.value_or(1);
    constexpr int kSeeds = 5;

    std::vector<FigureComparison> runs(kSeeds);
    run_parallel(kSeeds, opts.workers,
                 [&](int i) { runs[static_cast<std::size_t>(i)] = run_paired_comparison(
                                  capacity, base_seed + static_cast<std::uint64_t>(i)); });

    const ExperimentConfig cfg = fig_recipe(capacity);
    const PredictionSet pred = predict_for_node(cfg, *analysis_node(cfg));
    const int k = cfg.workload.catalog_size;
    std::ostringstream curve;
    curve << "rank,sim_lru,sim_tlru,pred_lru,pred_tlru\n";
    for (int rank = 1; rank <= k; ++rank) {
        double lru = 0.0, tlru = 0.0;
        for (const auto& r : runs) {
            lru += r.lru_per_rank[static_cast<std::size_t>(rank - 1)];
            tlru += r.tlru_per_rank[static_cast<std::size_t>(rank - 1)];
        }
        const auto i = static_cast<std::size_t>(rank - 1);
        curve << rank << ',' << fmt_g9(lru / kSeeds) << ',' << fmt_g9(tlru / kSeeds) << ','
              << fmt_g9(pred.per_content[i].lru) << ',' << fmt_g9(pred.per_content[i].tlru)
              << '\n';
    }
    write_file(out / (figure + "_hit_probability.csv"), curve.str());

    std::ostringstream summary;
    summary << "seed,capacity,lru_hit_ratio,tlru_hit_ratio,gap\n";
    for (const auto& r : runs)
        summary << r.seed << ',' << r.capacity << ',' << fmt_g9(r.lru_hit_ratio) << ','
                << fmt_g9(r.tlru_hit_ratio) << ','
                << fmt_g9(r.tlru_hit_ratio - r.lru_hit_ratio) << '\n';
    write_file(out / (figure + "_summary.csv"), summary.str());
    for (const auto& r : runs)
        std::cout << figure << " seed=" << r.seed << " lru=" << fmt_g9(r.lru_hit_ratio)
                  << " tlru=" << fmt_g9(r.tlru_hit_ratio) << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cache-network simulator and characteristic-time analytics"};
    app.require_subcommand(1);

    CommonOpts opts;
    std::string figure;
    std::vector<int> catalog_sizes{3, 4, 5};
    std::vector<int> cache_sizes{2, 3};

    auto add_common = [&](CLI::App* cmd, bool needs_config) {
        auto* c = cmd->add_option("--config", opts.config_path, "experiment config (JSON)");
        if (needs_config) c->required();
        cmd->add_option("--out", opts.out_dir, "output directory");
        cmd->add_option("--seed", [&](const std::vector<std::string>& v) {
            opts.seed = std::stoull(v.back());
            return true;
        }, "seed override");
        cmd->add_option("--workers", opts.workers, "worker threads for independent runs");
    };

    auto* sim = app.add_subcommand("simulate", "run the event simulator");
    add_common(sim, true);
    sim->add_option("--policy", [&](const std::vector<std::string>& v) {
        opts.policy = v.back();
        return true;
    }, "policy override for all cache nodes");
    sim->add_option("--cache-size", [&](const std::vector<std::string>& v) {
        opts.cache_size = std::stoi(v.back());
        return true;
    }, "capacity override for all cache nodes");

    auto* ana = app.add_subcommand("analyze", "characteristic time and hit predictions");
    add_common(ana, true);
    ana->add_option("--cache-size", [&](const std::vector<std::string>& v) {
        opts.cache_size = std::stoi(v.back());
        return true;
    }, "capacity override");

    auto* cls = app.add_subcommand("classify", "protective/non-protective classification");
    cls->add_option("--out", opts.out_dir, "output directory");
    cls->add_option("--catalog-sizes", catalog_sizes, "catalog sizes to enumerate");
    cls->add_option("--cache-sizes", cache_sizes, "cache sizes to enumerate");

    auto* rep = app.add_subcommand("reproduce", "run a bundled figure recipe");
    rep->add_option("figure", figure, "fig5, fig6, fig7 or fig8")->required();
    add_common(rep, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }

    try {
        if (sim->parsed()) return cmd_simulate(opts);
        if (ana->parsed()) return cmd_analyze(opts);
        if (cls->parsed()) return cmd_classify(opts.out_dir, catalog_sizes, cache_sizes);
        if (rep->parsed()) return cmd_reproduce(figure, opts);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
