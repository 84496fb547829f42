#pragma once

#include <atomic>
#include <cstdint>
#include <iosfwd>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include "lhvt/coding.hpp"
#include "lhvt/cost.hpp"
#include "lhvt/protocol.hpp"

namespace lhvt {

enum class Mode { vn, singlet, povm, entropy, coding, fidelity };

enum class ReportFormat { json, csv };

struct ExperimentConfig {
    Mode mode = Mode::vn;
    std::uint64_t master_seed = 1;
    std::uint64_t trials = 100'000;
    std::optional<UnitVec3> a;
    std::optional<UnitVec3> b;
    std::string povm_path;
    double tolerance_sigmas = 4.0;
    ReportFormat format = ReportFormat::json;
};

struct Check {
    std::string name;
    double value{};
    double target{};
    double tolerance{};  // absolute tolerance actually applied
    double sigmas{};     // deviation in standard-error units, when applicable
    bool pass{};
};

Check sigma_check(std::string name, double value, double target, double stderr_value,
                  double max_sigmas);
Check abs_check(std::string name, double value, double target, double tolerance);

struct StatsReport {
    std::string mode;
    std::uint64_t master_seed{};
    std::uint64_t trials{};
    nlohmann::ordered_json inputs = nlohmann::ordered_json::object();
    std::vector<std::pair<std::string, double>> quantities;
    std::vector<Check> checks;

    bool all_pass() const;
    const Check* first_failure() const;
    void add_quantity(std::string name, double value);

    // Reports are byte-identical for identical configs apart from the
    // timestamp, which can be omitted for comparisons.
    nlohmann::ordered_json to_json(bool with_timestamp = true) const;
    std::string to_csv() const;
};

// Worker count: LHVT_WORKERS when set, else hardware concurrency, clamped to
// [1, 64]. Results never depend on it: sessions are accumulated in fixed
// 8192-session blocks merged in block order.
unsigned effective_workers();

template <class Acc, class PerSession>
Acc run_sessions(std::uint64_t trials, PerSession&& per_session) {
    constexpr std::uint64_t block_size = 8192;
    const std::uint64_t n_blocks = (trials + block_size - 1) / block_size;
    std::vector<Acc> blocks(static_cast<std::size_t>(n_blocks));
    std::atomic<std::uint64_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;

    auto work = [&] {
        try {
            for (;;) {
                std::uint64_t bi = next.fetch_add(1, std::memory_order_relaxed);
                if (bi >= n_blocks || failed.load(std::memory_order_relaxed)) return;
                Acc& acc = blocks[static_cast<std::size_t>(bi)];
                std::uint64_t lo = bi * block_size;
                std::uint64_t hi = std::min(trials, lo + block_size);
                for (std::uint64_t i = lo; i < hi; ++i) per_session(i, acc);
            }
        } catch (...) {
            std::scoped_lock lock(error_mutex);
            if (!error) error = std::current_exception();
            failed.store(true, std::memory_order_relaxed);
        }
    };

    unsigned workers = static_cast<unsigned>(
        std::min<std::uint64_t>(effective_workers(), std::max<std::uint64_t>(n_blocks, 1)));
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    if (error) std::rethrow_exception(error);

    Acc total;
    for (Acc& b : blocks) total.merge(b);
    return total;
}

// Resolves configured or seed-derived (a, b) input vectors; both draws happen
// regardless of overrides so that supplying one vector does not shift the
// other.
std::pair<UnitVec3, UnitVec3> resolve_vectors(const ExperimentConfig& config);

StatsReport verify_vn(const ExperimentConfig& config);
StatsReport verify_singlet(const ExperimentConfig& config);
StatsReport verify_povm(const ExperimentConfig& config, const Povm& povm);

StatsReport run_entropy_mode(const ExperimentConfig& config);
StatsReport run_coding_mode(const ExperimentConfig& config);
StatsReport run_fidelity_mode(const ExperimentConfig& config);

// POVM input file: JSON array of 3-vectors; weights are the vector norms.
Povm load_povm_file(const std::string& path);

// Parses "x,y,z" into a normalized vector; throws std::invalid_argument.
UnitVec3 parse_unit_vector(const std::string& text);

// Full command-line entry point. Exit codes: 0 all checks passed,
// 1 a statistical check failed, 2 usage or validation error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lhvt
