#pragma once

#include <algorithm>
#include <cstdint>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "xray/parallel.hpp"
#include "xray/search.hpp"

// Policy comparison over paired heaps: every policy replays the same heap
// seeds, so differences come from the policy alone.

namespace xray {

struct PolicySummary {
    PolicyKind policy = PolicyKind::XRay;
    int n_heaps = 0;
    int successes = 0;
    double success_rate = 0.0;
    // Quartiles of action counts over successful episodes, linear interpolation.
    double q1 = 0.0;
    double median = 0.0;
    double q3 = 0.0;
    std::vector<int> success_histogram;  // index = action count, size horizon + 1
};

struct BenchReport {
    std::uint64_t base_seed = 0;
    int n_heaps = 0;
    RolloutConfig config;
    std::vector<PolicyKind> policies;
    std::vector<std::vector<RolloutRecord>> records;  // [policy][heap]
    std::vector<PolicySummary> summaries;
};

inline double quantile_sorted(const std::vector<int>& sorted, double p) {
    if (sorted.empty()) return 0.0;
    const double h = static_cast<double>(sorted.size() - 1) * p;
    const std::size_t lo = static_cast<std::size_t>(h);
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

inline PolicySummary summarize(PolicyKind policy,
                               const std::vector<RolloutRecord>& records, int horizon) {
    PolicySummary s;
    s.policy = policy;
    s.n_heaps = static_cast<int>(records.size());
    s.success_histogram.assign(static_cast<std::size_t>(horizon) + 1, 0);
    std::vector<int> actions;
    for (const auto& r : records) {
        if (!r.success) continue;
        ++s.successes;
        actions.push_back(r.action_count);
        if (r.action_count <= horizon) ++s.success_histogram[r.action_count];
    }
    s.success_rate = records.empty() ? 0.0
                                     : static_cast<double>(s.successes) /
                                           static_cast<double>(records.size());
    std::sort(actions.begin(), actions.end());
    s.q1 = quantile_sorted(actions, 0.25);
    s.median = quantile_sorted(actions, 0.5);
    s.q3 = quantile_sorted(actions, 0.75);
    return s;
}

inline BenchReport run_bench(const std::vector<PolicyKind>& policies, int n_heaps,
                             std::uint64_t base_seed, const RolloutConfig& config_in,
                             int n_workers = 1) {
    const RolloutConfig config = config_in.normalized();
    BenchReport report;
    report.base_seed = base_seed;
    report.n_heaps = n_heaps;
    report.config = config;
    report.policies = policies;
    report.records.assign(policies.size(),
                          std::vector<RolloutRecord>(static_cast<std::size_t>(n_heaps)));

    // Flat task list; each slot is written by exactly one worker, so the
    // result layout does not depend on scheduling.
    const std::size_t total = policies.size() * static_cast<std::size_t>(n_heaps);
    parallel_chunks(total, n_workers, [&](int, std::size_t begin, std::size_t end) {
        for (std::size_t t = begin; t < end; ++t) {
            const std::size_t p = t / static_cast<std::size_t>(n_heaps);
            const std::size_t i = t % static_cast<std::size_t>(n_heaps);
            report.records[p][i] =
                rollout(base_seed + i, policies[p], config);
        }
    });

    for (std::size_t p = 0; p < policies.size(); ++p)
        report.summaries.push_back(
            summarize(policies[p], report.records[p], config.horizon));
    return report;
}

inline std::string format_bench_table(const BenchReport& report) {
    std::ostringstream os;
    os << "heaps: " << report.n_heaps << "  base seed: " << report.base_seed
       << "  horizon: " << report.config.horizon << "\n\n";
    os << std::left << std::setw(10) << "policy" << std::right << std::setw(10)
       << "successes" << std::setw(9) << "rate" << std::setw(7) << "q1" << std::setw(9)
       << "median" << std::setw(7) << "q3" << "\n";
    os << std::string(52, '-') << "\n";
    for (const auto& s : report.summaries) {
        std::ostringstream frac, rate;
        frac << s.successes << "/" << s.n_heaps;
        rate << std::fixed << std::setprecision(1) << 100.0 * s.success_rate << "%";
        os << std::left << std::setw(10) << policy_name(s.policy) << std::right
           << std::setw(10) << frac.str() << std::setw(9) << rate.str() << std::fixed
           << std::setprecision(1) << std::setw(7) << s.q1 << std::setw(9) << s.median
           << std::setw(7) << s.q3 << "\n";
    }
    os << "\nreference (200 heaps, 14 distractors, horizon 10):\n"
       << "  xray 82% (3/5/6), largest 67% (4/5/7), random 42% (4/7/9)\n";
    return os.str();
}

inline std::string bench_csv(const BenchReport& report) {
    std::ostringstream os;
    os << "policy,seed,success,action_count,discounted_return\n";
    for (std::size_t p = 0; p < report.policies.size(); ++p)
        for (const auto& r : report.records[p])
            os << policy_name(r.policy) << "," << r.seed << "," << (r.success ? 1 : 0)
               << "," << r.action_count << "," << r.discounted_return << "\n";
    return os.str();
}

inline std::string histogram_csv(const BenchReport& report) {
    std::ostringstream os;
    os << "actions";
    for (const auto& s : report.summaries) os << "," << policy_name(s.policy);
    os << "\n";
    for (int k = 1; k <= report.config.horizon; ++k) {
        os << k;
        for (const auto& s : report.summaries)
            os << "," << s.success_histogram[static_cast<std::size_t>(k)];
        os << "\n";
    }
    return os.str();
}

}  // namespace xray
