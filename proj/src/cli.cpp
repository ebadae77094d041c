#include <anka/bench.hpp>
#include <anka/cli.hpp>
#include <anka/interpreter.hpp>
#include <anka/io.hpp>
#include <anka/syntax.hpp>
#include <anka/validator.hpp>

#include <CLI11.hpp>

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

namespace anka {

namespace {

namespace fs = std::filesystem;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

auto read_text(const std::string& path) -> std::string {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw UsageError("cannot read '" + path + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

auto extension_of(const std::string& path) -> std::string {
    std::string ext = fs::path(path).extension().string();
    for (auto& c : ext) {
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    return ext;
}

auto while_cap_from_env() -> std::uint64_t {
    const char* env = std::getenv("ANKA_WHILE_CAP");
    if (env == nullptr || *env == '\0') {
        return RunOptions{}.while_cap;
    }
    std::string_view s(env);
    std::uint64_t cap = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), cap);
    if (ec != std::errc() || p != s.data() + s.size()) {
        throw UsageError("ANKA_WHILE_CAP must be a non-negative integer, got '" + std::string(s) +
                         "'");
    }
    return cap;
}

struct Loaded {
    Pipeline pipeline;
    ValidationResult validation;
};

class Commands {
public:
    Commands(std::ostream& out, std::ostream& err) : out_(out), err_(err) {}

    std::string file;
    bool ast = false;
    bool json_diagnostics = false;
    std::vector<std::string> inputs;
    std::string output;
    bool sandbox = false;
    bool no_sandbox = false;
    std::string suite;
    std::string candidates;
    std::string report;
    std::string markdown;
    unsigned jobs = 1;
    bool order_insensitive = false;
    bool timings = false;
    unsigned timeout_ms = 5000;

    auto parse_cmd() -> int {
        Pipeline p;
        if (!parse_file(p)) {
            return kExitInvalidProgram;
        }
        if (ast) {
            out_ << pipeline_to_json(p).dump(2) << '\n';
        } else if (!json_diagnostics) {
            out_ << file << ": ok\n";
        } else {
            out_ << "[]\n";
        }
        return kExitOk;
    }

    auto check_cmd() -> int {
        Loaded l;
        if (!load(l)) {
            return kExitInvalidProgram;
        }
        if (json_diagnostics) {
            out_ << nlohmann::ordered_json::array().dump() << '\n';
        } else {
            out_ << "OUTPUT " << l.pipeline.output.text << ": "
                 << l.validation.output_schema->to_string() << '\n';
        }
        return kExitOk;
    }

    auto run_cmd() -> int {
        RunOptions options;
        options.sandboxed = sandbox;
        options.while_cap = while_cap_from_env();
        std::string out_format = output.empty() ? ".json" : extension_of(output);
        if (out_format != ".json" && out_format != ".csv") {
            throw UsageError("--output must end in .json or .csv");
        }
        Loaded l;
        if (!load(l)) {
            return kExitInvalidProgram;
        }
        InputTables tables = load_inputs(l.pipeline);

        SystemIoAdapter io;
        Table result;
        try {
            result = run_pipeline(l.pipeline, tables, io, options);
        } catch (const RuntimeError& e) {
            err_ << file << ":" << e.what() << '\n';
            return kExitRuntime;
        } catch (const InputError& e) {
            throw UsageError(e.what());
        } catch (const InternalError& e) {
            err_ << file << ": internal error: " << e.what() << '\n';
            return kExitRuntime;
        }

        std::string bytes =
            out_format == ".csv" ? table_to_csv(result) : table_to_json_value(result).dump(2) + "\n";
        if (output.empty()) {
            out_ << bytes;
        } else {
            try {
                io.write_file(output, bytes);
            } catch (const IoFailure& e) {
                throw UsageError(e.what());
            }
        }
        return kExitOk;
    }

    auto bench_cmd() -> int {
        bench::Suite s;
        try {
            s = bench::load_suite(suite);
        } catch (const bench::SuiteError& e) {
            err_ << "error: " << e.what() << '\n';
            return kExitUsage;
        }
        if (!fs::is_directory(candidates)) {
            throw UsageError("candidates directory '" + candidates + "' does not exist");
        }
        bench::EvalOptions options;
        options.sandboxed = !no_sandbox;
        options.while_cap = while_cap_from_env();
        options.force_order_insensitive = order_insensitive;
        options.time_limit = std::chrono::milliseconds(timeout_ms);
        auto cands = bench::load_candidates(candidates, s);

        SystemIoAdapter system;
        DenyAllIoAdapter deny;
        IoAdapter& io = options.sandboxed ? static_cast<IoAdapter&>(deny) : system;
        auto rep = bench::run_suite(s, cands, io, options, std::max(1U, jobs));

        std::string json = bench::report_to_json(rep, timings).dump(2) + "\n";
        std::string md = bench::report_to_markdown(rep);
        if (!report.empty()) {
            write(report, json);
        }
        if (!markdown.empty()) {
            write(markdown, md);
        }
        out_ << md;
        for (const auto& t : rep.tasks) {
            if (t.no_samples) {
                err_ << "warning: task '" << t.id << "' has no samples\n";
            }
        }
        return kExitOk;
    }

private:
    static void write(const std::string& path, const std::string& bytes) {
        std::ofstream f(path, std::ios::binary | std::ios::trunc);
        if (!f || !(f << bytes)) {
            throw UsageError("cannot write '" + path + "'");
        }
    }

    auto parse_file(Pipeline& p) -> bool {
        std::string src = read_text(file);
        try {
            p = parse(src);
            return true;
        } catch (const ParseError& e) {
            if (json_diagnostics) {
                out_ << nlohmann::ordered_json::array(
                            {{{"kind", "ParseError"},
                              {"message", e.message()},
                              {"line", e.location().line},
                              {"column", e.location().column}}})
                            .dump()
                     << '\n';
            } else {
                err_ << file << ":" << e.what() << '\n';
            }
            return false;
        }
    }

    auto load(Loaded& l) -> bool {
        if (!parse_file(l.pipeline)) {
            return false;
        }
        l.validation = validate(l.pipeline);
        if (l.validation.ok()) {
            return true;
        }
        if (json_diagnostics) {
            out_ << diagnostics_to_json(l.validation.errors).dump() << '\n';
        } else {
            for (const auto& e : l.validation.errors) {
                err_ << file << ":" << to_string(e.location) << ": "
                     << validation_error_kind_name(e.kind) << ": " << e.message << '\n';
            }
        }
        return false;
    }

    auto load_inputs(const Pipeline& p) -> InputTables {
        std::map<std::string, std::string, std::less<>> paths;
        for (const auto& binding : inputs) {
            auto eq = binding.find('=');
            if (eq == std::string::npos || eq == 0) {
                throw UsageError("--input expects name=path, got '" + binding + "'");
            }
            if (!paths.emplace(binding.substr(0, eq), binding.substr(eq + 1)).second) {
                throw UsageError("input '" + binding.substr(0, eq) + "' bound twice");
            }
        }
        InputTables tables;
        for (const auto& in : p.inputs) {
            auto it = paths.find(in.name.text);
            if (it == paths.end()) {
                throw UsageError("no --input binding for INPUT '" + in.name.text + "'");
            }
            std::string bytes = read_text(it->second);
            std::string ext = extension_of(it->second);
            try {
                if (ext == ".csv") {
                    tables.emplace(in.name.text, table_from_csv(bytes, in.schema));
                } else if (ext == ".json") {
                    tables.emplace(in.name.text, table_from_json(bytes, in.schema));
                } else {
                    throw UsageError("input '" + it->second + "' must end in .json or .csv");
                }
            } catch (const DataFormatError& e) {
                throw UsageError(it->second + ": " + e.what());
            }
            paths.erase(it);
        }
        if (!paths.empty()) {
            throw UsageError("pipeline declares no INPUT '" + paths.begin()->first + "'");
        }
        return tables;
    }

    std::ostream& out_;
    std::ostream& err_;
};

}  // namespace

auto run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) -> int {
    Commands cmd(out, err);
    CLI::App app{"Anka data-transformation pipelines", "anka"};
    app.require_subcommand(1);

    auto* parse = app.add_subcommand("parse", "Parse a pipeline");
    parse->add_option("file", cmd.file, "Pipeline source")->required();
    parse->add_flag("--ast", cmd.ast, "Print the syntax tree as JSON");
    parse->add_flag("--json-diagnostics", cmd.json_diagnostics, "Report errors as JSON");

    auto* check = app.add_subcommand("check", "Parse and validate a pipeline");
    check->add_option("file", cmd.file, "Pipeline source")->required();
    check->add_flag("--json-diagnostics", cmd.json_diagnostics, "Report errors as JSON");

    auto* run = app.add_subcommand("run", "Run a pipeline");
    run->add_option("file", cmd.file, "Pipeline source")->required();
    run->add_option("--input", cmd.inputs, "Bind an INPUT to a .json or .csv file (name=path)");
    run->add_option("--output", cmd.output, "Write the OUTPUT table here (.json or .csv)");
    run->add_flag("--sandbox,!--no-sandbox", cmd.sandbox, "Refuse READ/WRITE/FETCH/POST");
    run->add_flag("--json-diagnostics", cmd.json_diagnostics, "Report errors as JSON");

    auto* bench = app.add_subcommand("bench", "Score candidate programs against a task suite");
    bench->add_option("suite", cmd.suite, "Suite JSON file")->required();
    bench->add_option("candidates", cmd.candidates, "Directory of <task_id>/*.anka")->required();
    bench->add_option("--report", cmd.report, "Write the JSON report here");
    bench->add_option("--markdown", cmd.markdown, "Write the markdown table here");
    bench->add_option("--jobs,-j", cmd.jobs, "Samples evaluated concurrently")
        ->check(CLI::PositiveNumber);
    bench->add_flag("--order-insensitive", cmd.order_insensitive,
                    "Compare every output as a multiset of rows");
    bench->add_flag("!--sandbox,--no-sandbox", cmd.no_sandbox, "Allow file and network access");
    bench->add_option("--timeout-ms", cmd.timeout_ms, "Wall-clock limit per sample")
        ->check(CLI::PositiveNumber);
    bench->add_flag("--timings", cmd.timings, "Include per-sample runtimes in the report");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        for (auto* sub : app.get_subcommands()) {
            err << sub->help();
        }
        return kExitUsage;
    }

    try {
        if (*parse) {
            return cmd.parse_cmd();
        }
        if (*check) {
            return cmd.check_cmd();
        }
        if (*run) {
            return cmd.run_cmd();
        }
        return cmd.bench_cmd();
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }
}

}  // namespace anka
