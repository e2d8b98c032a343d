// Command line front end: policy benchmarks, single rollouts with image
// dumps, dataset generation, and artifact inspection.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "xray/xray.hpp"

namespace fs = std::filesystem;
using namespace xray;

namespace {

bool log_enabled() {
    const char* v = std::getenv("XRAY_LOG");
    return v && *v && std::string(v) != "0";
}

void vlog(const std::string& msg) {
    if (log_enabled()) std::cerr << "[xray] " << msg << "\n";
}

struct CommonOpts {
    std::uint64_t seed = 1;
    int objects = 14;
    int horizon = 10;
    int grid_stride = 8;
    int rot_bins = 16;
    double tau_grasp = kDefaultTauGrasp;
    int threads = 1;
    double sigma = 0.0;             // 0: keep the config default
    double target_sigma_frac = -1;  // <0: keep the config default
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--seed", o.seed, "base heap seed");
    cmd->add_option("--objects", o.objects, "distractor count per heap")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--horizon", o.horizon, "max actions per episode")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--grid-stride", o.grid_stride, "candidate translation stride, px")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--rot-bins", o.rot_bins, "candidate rotation bins")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--tau-grasp", o.tau_grasp, "visible fraction needed to grasp")
        ->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--threads", o.threads, "worker threads")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--sigma", o.sigma, "distractor placement spread, px");
    cmd->add_option("--target-sigma-frac", o.target_sigma_frac,
                    "target spread as a fraction of --sigma");
}

RolloutConfig rollout_config(const CommonOpts& o) {
    RolloutConfig cfg;
    cfg.heap = HeapConfig::simulation_preset();
    cfg.heap.n_min = cfg.heap.n_max = o.objects;
    cfg.heap.n_rot = o.rot_bins;
    if (o.sigma > 0.0) cfg.heap.placement_sigma = o.sigma;
    if (o.target_sigma_frac >= 0.0) cfg.heap.target_sigma_frac = o.target_sigma_frac;
    cfg.grid = CandidateGrid::for_workspace(cfg.heap.width, cfg.heap.height,
                                            o.grid_stride, o.rot_bins);
    cfg.grid_set = true;
    cfg.horizon = o.horizon;
    cfg.tau_grasp = o.tau_grasp;
    return cfg;
}

int cmd_bench(const CommonOpts& o, int heaps, const std::vector<std::string>& policy_names,
              const std::string& out_dir) {
    std::vector<PolicyKind> policies;
    for (const auto& name : policy_names) {
        const auto p = parse_policy(name);
        if (!p) {
            std::cerr << "unknown policy: " << name << "\n";
            return 1;
        }
        policies.push_back(*p);
    }
    RolloutConfig cfg = rollout_config(o);
    cfg.log_support = true;

    vlog("bench: " + std::to_string(heaps) + " heaps x " +
         std::to_string(policies.size()) + " policies");
    const auto t0 = std::chrono::steady_clock::now();
    const BenchReport report = run_bench(policies, heaps, o.seed, cfg, o.threads);
    const auto dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0);
    vlog("bench finished in " + std::to_string(dt.count()) + " s");

    std::cout << format_bench_table(report);

    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        std::ofstream(fs::path(out_dir) / "bench.csv") << bench_csv(report);
        std::ofstream(fs::path(out_dir) / "histogram.csv") << histogram_csv(report);
        std::ofstream records((fs::path(out_dir) / "records.jsonl").string());
        for (const auto& per_policy : report.records)
            for (const auto& r : per_policy) records << nlohmann::json(r).dump() << "\n";
        std::cout << "\nwrote " << out_dir << "/{bench.csv,histogram.csv,records.jsonl}\n";
    }
    return 0;
}

int cmd_rollout(const CommonOpts& o, const std::string& policy_name, bool log_support,
                const std::string& out_dir) {
    const auto policy = parse_policy(policy_name);
    if (!policy) {
        std::cerr << "unknown policy: " << policy_name << "\n";
        return 1;
    }
    RolloutConfig cfg = rollout_config(o);
    cfg.log_support = log_support;
    cfg.dist_workers = o.threads;

    const RolloutRecord rec = rollout(o.seed, *policy, cfg);
    std::cout << "seed " << rec.seed << "  policy " << policy_name << "  "
              << (rec.success ? "success" : "failure") << " after " << rec.action_count
              << " actions\n";
    for (const auto& st : rec.steps) {
        std::cout << "  step " << st.index << ": ";
        if (st.action_id)
            std::cout << "grasp id " << *st.action_id << (st.reward ? " (target)" : "");
        else
            std::cout << "no graspable object";
        if (st.support_before)
            std::cout << "  support " << *st.support_before << " -> "
                      << (st.support_after ? std::to_string(*st.support_after) : "?");
        std::cout << "\n";
    }

    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        std::ofstream((fs::path(out_dir) / "record.json").string())
            << nlohmann::json(rec).dump(2) << "\n";
        // Replay the episode to dump per-step images; the engine is
        // deterministic so the replayed states match the recorded ones.
        Scene scene = sample_heap(o.seed, cfg.heap);
        for (const auto& st : rec.steps) {
            const auto obs = observe(scene);
            const auto dist = occupancy_distribution(scene, cfg.grid, o.threads,
                                                     cfg.iou_threshold);
            std::ostringstream prefix;
            prefix << "step_" << std::setw(2) << std::setfill('0') << st.index << "_";
            const std::string base = (fs::path(out_dir) / prefix.str()).string();
            write_depth_png(base + "depth.png", obs.depth.values);
            write_mask_png(base + "target.png", obs.target_modal);
            write_distribution_png(base + "dist.png", dist.values);
            if (st.action_id && st.grasped) scene = remove(scene, *st.action_id);
        }
        std::cout << "wrote " << out_dir << "/record.json and step images\n";
    }
    return 0;
}

// "A..B" inclusive, e.g. "0..99" = seeds 0 through 99.
bool parse_seed_range(const std::string& text, std::uint64_t& begin,
                      std::uint64_t& count) {
    const auto dots = text.find("..");
    if (dots == std::string::npos) return false;
    try {
        const std::uint64_t lo = std::stoull(text.substr(0, dots));
        const std::uint64_t hi = std::stoull(text.substr(dots + 2));
        if (hi < lo) return false;
        begin = lo;
        count = hi - lo + 1;
        return true;
    } catch (...) {
        return false;
    }
}

int cmd_gen_dataset(std::uint64_t seed, std::uint64_t samples, int width, int height,
                    int shard_size, double train_frac, int threads,
                    const std::string& out_dir) {
    DatasetConfig cfg;
    cfg.heap.width = width;
    cfg.heap.height = height;
    cfg.shard_size = shard_size;
    cfg.train_frac = train_frac;
    vlog("gen-dataset: " + std::to_string(samples) + " samples at " +
         std::to_string(width) + "x" + std::to_string(height));
    const auto t0 = std::chrono::steady_clock::now();
    const Manifest m = generate_dataset(seed, samples, cfg, out_dir, threads);
    const auto dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0);
    std::cout << "wrote " << m.shards.size() << " shard(s), " << m.n_samples
              << " samples, hash " << m.hash << ", " << dt.count() << " s\n";
    if (!m.complete) {
        for (const auto& e : m.errors) std::cerr << "error: " << e << "\n";
        return 1;
    }
    return 0;
}

int cmd_inspect(const std::string& path, const std::string& dump_dir, int limit) {
    if (fs::is_directory(path)) {
        const auto check = verify_dataset(path);
        const Manifest m = read_manifest(path);
        std::cout << "dataset " << path << ": " << m.n_samples << " samples, "
                  << m.width << "x" << m.height << ", " << m.shards.size()
                  << " shard(s), hash " << m.hash << "\n";
        std::cout << "train seeds [" << m.train.seed_begin << ", " << m.train.seed_end
                  << "), test seeds [" << m.test.seed_begin << ", " << m.test.seed_end
                  << ")\n";
        std::cout << "integrity: " << (check.ok ? "ok" : "FAILED") << " ("
                  << check.samples_seen << " samples verified)\n";
        for (const auto& e : check.errors) std::cerr << "  " << e << "\n";
        return check.ok ? 0 : 1;
    }

    const auto records = read_shard(path);
    std::cout << path << ": " << records.size() << " sample(s)";
    if (!records.empty())
        std::cout << ", " << records.front().target_modal.width << "x"
                  << records.front().target_modal.height;
    std::cout << "\n";
    for (std::size_t k = 0; k < records.size() && k < static_cast<std::size_t>(limit);
         ++k) {
        const auto& rec = records[k];
        std::cout << "  [" << k << "] seed " << rec.meta.seed << ", pose ("
                  << rec.meta.target_pose.tx << ", " << rec.meta.target_pose.ty
                  << ", bin " << rec.meta.target_pose.rot_bin << "), "
                  << rec.meta.object_count << " distractors, mask "
                  << mask_area(rec.target_modal) << " px, support "
                  << support_size(OccupancyDistribution{rec.dist, {}}) << " px\n";
        if (!dump_dir.empty()) {
            fs::create_directories(dump_dir);
            std::ostringstream prefix;
            prefix << "sample_" << std::setw(4) << std::setfill('0') << k << "_";
            const std::string base = (fs::path(dump_dir) / prefix.str()).string();
            write_mask_png(base + "target.png", rec.target_modal);
            write_depth_png(base + "depth.png", rec.depth);
            write_distribution_png(base + "dist.png", rec.dist);
        }
    }
    if (!dump_dir.empty()) std::cout << "wrote image dumps to " << dump_dir << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"mechanical search simulator: occupancy distributions over hidden "
                 "target poses, grasp policies, and dataset export"};
    app.require_subcommand(1);

    CommonOpts bench_opts;
    int bench_heaps = 200;
    std::vector<std::string> bench_policies = {"xray", "largest", "random"};
    std::string bench_out;
    auto* bench = app.add_subcommand("bench", "compare policies over paired heaps");
    add_common(bench, bench_opts);
    bench->add_option("--heaps", bench_heaps, "episodes per policy")
        ->check(CLI::PositiveNumber);
    bench->add_option("--policy", bench_policies, "policies to run")->delimiter(',');
    bench->add_option("--out", bench_out, "directory for csv/jsonl output");

    CommonOpts roll_opts;
    std::string roll_policy = "xray";
    std::string roll_out;
    bool roll_support = false;
    auto* roll = app.add_subcommand("rollout", "run one episode, optionally dump images");
    add_common(roll, roll_opts);
    roll->add_option("--policy", roll_policy, "policy to run");
    roll->add_option("--out", roll_out, "directory for record.json and step images");
    roll->add_flag("--log-support", roll_support, "track support for any policy");

    std::uint64_t ds_seed = 0;
    std::uint64_t ds_samples = 1000;
    int ds_width = 256, ds_height = 192, ds_shard = 100, ds_threads = 1;
    double ds_train_frac = 0.8;
    std::string ds_out, ds_range;
    auto* gen = app.add_subcommand("gen-dataset", "export training shards");
    gen->add_option("--seed", ds_seed, "first heap seed");
    gen->add_option("--samples", ds_samples, "total sample count")
        ->check(CLI::PositiveNumber);
    gen->add_option("--seeds", ds_range, "inclusive seed range A..B");
    gen->add_option("--width", ds_width, "workspace width, px")->check(CLI::PositiveNumber);
    gen->add_option("--height", ds_height, "workspace height, px")
        ->check(CLI::PositiveNumber);
    gen->add_option("--shard-size", ds_shard, "samples per shard")
        ->check(CLI::PositiveNumber);
    gen->add_option("--train-frac", ds_train_frac, "fraction of seeds in the train split")
        ->check(CLI::Range(0.0, 1.0));
    gen->add_option("--threads", ds_threads, "worker threads")->check(CLI::PositiveNumber);
    gen->add_option("--out", ds_out, "output directory")->required();

    std::string ins_path, ins_dump;
    int ins_limit = 4;
    auto* ins = app.add_subcommand("inspect", "verify a dataset dir or dump a shard");
    ins->add_option("path", ins_path, "dataset directory or shard file")->required();
    ins->add_option("--dump", ins_dump, "directory for png dumps");
    ins->add_option("--limit", ins_limit, "samples to list/dump")
        ->check(CLI::PositiveNumber);

    CLI11_PARSE(app, argc, argv);

    try {
        if (bench->parsed())
            return cmd_bench(bench_opts, bench_heaps, bench_policies, bench_out);
        if (roll->parsed())
            return cmd_rollout(roll_opts, roll_policy, roll_support, roll_out);
        if (gen->parsed()) {
            if (!ds_range.empty() && !parse_seed_range(ds_range, ds_seed, ds_samples)) {
                std::cerr << "bad --seeds range (want A..B): " << ds_range << "\n";
                return 1;
            }
            return cmd_gen_dataset(ds_seed, ds_samples, ds_width, ds_height, ds_shard,
                                   ds_train_frac, ds_threads, ds_out);
        }
        if (ins->parsed()) return cmd_inspect(ins_path, ins_dump, ins_limit);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
