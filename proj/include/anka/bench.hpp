#pragma once

#include <anka/interpreter.hpp>
#include <anka/table.hpp>

#include <json.hpp>

#include <array>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace anka::bench {

/// Task categories in report order.
inline constexpr std::array<std::string_view, 8> kCategories = {
    "filter", "map", "aggregate", "strings", "multi_step", "finance", "hard", "adversarial"};

/// Malformed suite document. The message names the task (and test) at fault.
class SuiteError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct InputDecl {
    std::string name;
    Schema schema;
};

struct TestCase {
    InputTables inputs;
    Table expected;
};

struct TaskSpec {
    std::string id;
    std::string category;
    std::string description;
    std::vector<InputDecl> inputs;
    std::vector<TestCase> tests;
    /// Compare outputs as multisets instead of ordered row lists.
    bool order_insensitive = false;
};

struct Suite {
    std::string name;
    std::vector<TaskSpec> tasks;
};

auto parse_suite(const nlohmann::ordered_json& doc) -> Suite;
/// Reads and parses a suite file. Throws SuiteError.
auto load_suite(const std::filesystem::path& path) -> Suite;

struct SampleResult {
    std::string sample;
    bool parse = false;
    bool execute = false;
    bool correct = false;
    /// Empty when correct; otherwise the first failure.
    std::string detail;
    double seconds = 0.0;
};

struct EvalOptions {
    bool sandboxed = true;
    std::chrono::milliseconds time_limit = std::chrono::seconds(5);
    std::uint64_t while_cap = 100'000;
    /// Treat every task as order-insensitive.
    bool force_order_insensitive = false;
};

/// Parses, validates and runs `source` against every test case of `task`.
/// Never throws for problems in the candidate.
auto evaluate_sample(const TaskSpec& task, std::string_view source, IoAdapter& io,
                     const EvalOptions& options = {}) -> SampleResult;

/// At least half of the samples are correct. False for no samples.
auto task_accuracy(const std::vector<SampleResult>& results) -> bool;

struct Candidate {
    std::string name;
    std::string source;
};

/// Task id -> candidate programs, read from `<dir>/<task_id>/*.anka` in
/// natural filename order. Tasks without a directory get no entry.
auto load_candidates(const std::filesystem::path& dir, const Suite& suite)
    -> std::map<std::string, std::vector<Candidate>>;

struct TaskReport {
    std::string id;
    std::string category;
    std::vector<SampleResult> samples;
    bool accurate = false;
    bool no_samples = false;
};

struct Totals {
    std::size_t tasks = 0;
    std::size_t accurate_tasks = 0;
    std::size_t samples = 0;
    std::size_t parsed = 0;
    std::size_t executed = 0;
    std::size_t correct = 0;

    [[nodiscard]] auto parse_rate() const -> double;
    [[nodiscard]] auto execution_rate() const -> double;
    [[nodiscard]] auto correctness_rate() const -> double;
    [[nodiscard]] auto task_accuracy() const -> double;
};

struct RunReport {
    std::string suite;
    std::vector<TaskReport> tasks;
    /// Categories present in the suite, in kCategories order.
    std::vector<std::pair<std::string, Totals>> categories;
    Totals overall;
};

/// Evaluates every candidate, up to `jobs` at a time. The report does not
/// depend on `jobs`.
auto run_suite(const Suite& suite, const std::map<std::string, std::vector<Candidate>>& candidates,
               IoAdapter& io, const EvalOptions& options = {}, unsigned jobs = 1) -> RunReport;

/// Totals over already evaluated tasks.
auto summarize(const std::vector<TaskReport>& tasks) -> Totals;

/// Runtimes are left out unless `timings` is set, so that repeated runs
/// produce identical bytes.
auto report_to_json(const RunReport& report, bool timings = false) -> nlohmann::ordered_json;

/// One row per category plus an Overall row.
auto report_to_markdown(const RunReport& report) -> std::string;

}  // namespace anka::bench
