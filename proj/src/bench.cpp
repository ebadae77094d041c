#include <anka/bench.hpp>
#include <anka/io.hpp>
#include <anka/syntax.hpp>
#include <anka/validator.hpp>

#include <algorithm>
#include <atomic>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

namespace anka::bench {

namespace {

using nlohmann::ordered_json;
namespace fs = std::filesystem;

auto schema_from_json(const ordered_json& j, const std::string& where) -> Schema {
    if (!j.is_array()) {
        throw SuiteError(where + ": schema must be an array of {name, type}");
    }
    std::vector<Field> fields;
    for (const auto& f : j) {
        if (!f.is_object() || !f.contains("name") || !f.contains("type") ||
            !f["name"].is_string() || !f["type"].is_string()) {
            throw SuiteError(where + ": schema entries need string \"name\" and \"type\"");
        }
        auto type = parse_type_name(f["type"].get<std::string>());
        if (!type) {
            throw SuiteError(where + ": unknown type '" + f["type"].get<std::string>() + "'");
        }
        fields.push_back({f["name"].get<std::string>(), *type});
    }
    try {
        return Schema(std::move(fields));
    } catch (const std::invalid_argument& e) {
        throw SuiteError(where + ": " + e.what());
    }
}

auto rows_from_json(const ordered_json& rows, const Schema& schema, const std::string& where)
    -> Table {
    try {
        return table_from_json_value(rows, schema);
    } catch (const DataFormatError& e) {
        throw SuiteError(where + ": " + e.what());
    }
}

auto string_field(const ordered_json& obj, const char* key, const std::string& where,
                  bool required = true) -> std::string {
    if (!obj.contains(key)) {
        if (required) {
            throw SuiteError(where + ": missing \"" + std::string(key) + "\"");
        }
        return {};
    }
    if (!obj[key].is_string()) {
        throw SuiteError(where + ": \"" + std::string(key) + "\" must be a string");
    }
    return obj[key].get<std::string>();
}

auto parse_task(const ordered_json& t, std::size_t index) -> TaskSpec {
    std::string where = "task #" + std::to_string(index);
    if (!t.is_object()) {
        throw SuiteError(where + ": must be an object");
    }
    TaskSpec task;
    task.id = string_field(t, "id", where);
    where = "task '" + task.id + "'";
    task.category = string_field(t, "category", where);
    if (std::find(kCategories.begin(), kCategories.end(), task.category) == kCategories.end()) {
        throw SuiteError(where + ": unknown category '" + task.category + "'");
    }
    task.description = string_field(t, "description", where, false);
    if (t.contains("order_insensitive")) {
        if (!t["order_insensitive"].is_boolean()) {
            throw SuiteError(where + ": \"order_insensitive\" must be a boolean");
        }
        task.order_insensitive = t["order_insensitive"].get<bool>();
    }

    if (!t.contains("inputs") || !t["inputs"].is_array()) {
        throw SuiteError(where + ": \"inputs\" must be an array");
    }
    std::set<std::string> names;
    for (const auto& in : t["inputs"]) {
        if (!in.is_object()) {
            throw SuiteError(where + ": input declarations must be objects");
        }
        InputDecl decl;
        decl.name = string_field(in, "name", where);
        decl.schema = schema_from_json(in.value("schema", ordered_json()),
                                       where + ", input '" + decl.name + "'");
        if (!names.insert(decl.name).second) {
            throw SuiteError(where + ": input '" + decl.name + "' declared twice");
        }
        task.inputs.push_back(std::move(decl));
    }

    if (!t.contains("tests") || !t["tests"].is_array() || t["tests"].empty()) {
        throw SuiteError(where + ": needs at least one test");
    }
    for (std::size_t k = 0; k < t["tests"].size(); ++k) {
        const auto& tc = t["tests"][k];
        std::string at = where + ", test " + std::to_string(k);
        if (!tc.is_object() || !tc.contains("inputs") || !tc["inputs"].is_object()) {
            throw SuiteError(at + ": \"inputs\" must be an object");
        }
        TestCase test;
        for (const auto& decl : task.inputs) {
            if (!tc["inputs"].contains(decl.name)) {
                throw SuiteError(at + ": no rows for input '" + decl.name + "'");
            }
            test.inputs.emplace(decl.name, rows_from_json(tc["inputs"][decl.name], decl.schema,
                                                          at + ", input '" + decl.name + "'"));
        }
        for (const auto& [name, rows] : tc["inputs"].items()) {
            if (!names.contains(name)) {
                throw SuiteError(at + ": rows for undeclared input '" + name + "'");
            }
        }
        if (!tc.contains("expected") || !tc["expected"].is_object()) {
            throw SuiteError(at + ": \"expected\" must be an object with schema and rows");
        }
        const auto& exp = tc["expected"];
        Schema schema = schema_from_json(exp.value("schema", ordered_json()), at + ", expected");
        test.expected = rows_from_json(exp.value("rows", ordered_json()), schema, at + ", expected");
        task.tests.push_back(std::move(test));
    }
    return task;
}

// "s2" < "s10".
auto natural_less(const std::string& a, const std::string& b) -> bool {
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < a.size() && j < b.size()) {
        bool da = std::isdigit(static_cast<unsigned char>(a[i])) != 0;
        bool db = std::isdigit(static_cast<unsigned char>(b[j])) != 0;
        if (da && db) {
            std::size_t ie = i;
            std::size_t je = j;
            while (ie < a.size() && std::isdigit(static_cast<unsigned char>(a[ie]))) {
                ++ie;
            }
            while (je < b.size() && std::isdigit(static_cast<unsigned char>(b[je]))) {
                ++je;
            }
            std::string_view na(a.data() + i, ie - i);
            std::string_view nb(b.data() + j, je - j);
            while (na.size() > 1 && na.front() == '0') {
                na.remove_prefix(1);
            }
            while (nb.size() > 1 && nb.front() == '0') {
                nb.remove_prefix(1);
            }
            if (na.size() != nb.size()) {
                return na.size() < nb.size();
            }
            if (na != nb) {
                return na < nb;
            }
            i = ie;
            j = je;
            continue;
        }
        if (a[i] != b[j]) {
            return a[i] < b[j];
        }
        ++i;
        ++j;
    }
    if ((a.size() - i) != (b.size() - j)) {
        return (a.size() - i) < (b.size() - j);
    }
    return a < b;
}

auto ratio(std::size_t num, std::size_t den) -> double {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

auto totals_json(const Totals& t) -> ordered_json {
    return {{"tasks", t.tasks},
            {"accurate_tasks", t.accurate_tasks},
            {"samples", t.samples},
            {"parsed", t.parsed},
            {"executed", t.executed},
            {"correct", t.correct},
            {"parse_rate", t.parse_rate()},
            {"execution_rate", t.execution_rate()},
            {"correctness_rate", t.correctness_rate()},
            {"task_accuracy", t.task_accuracy()}};
}

auto percent(double r) -> std::string {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1f%%", r * 100.0);
    return buf;
}

}  // namespace

auto parse_suite(const ordered_json& doc) -> Suite {
    if (!doc.is_object()) {
        throw SuiteError("suite must be a JSON object");
    }
    Suite suite;
    suite.name = doc.value("name", std::string("suite"));
    if (!doc.contains("tasks") || !doc["tasks"].is_array()) {
        throw SuiteError("suite needs a \"tasks\" array");
    }
    if (doc["tasks"].empty()) {
        throw SuiteError("suite must contain at least one task");
    }
    std::set<std::string> ids;
    for (std::size_t i = 0; i < doc["tasks"].size(); ++i) {
        TaskSpec task = parse_task(doc["tasks"][i], i);
        if (!ids.insert(task.id).second) {
            throw SuiteError("task '" + task.id + "': duplicate task id");
        }
        suite.tasks.push_back(std::move(task));
    }
    return suite;
}

auto load_suite(const fs::path& path) -> Suite {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw SuiteError("cannot read suite '" + path.string() + "'");
    }
    ordered_json doc;
    try {
        doc = ordered_json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw SuiteError(path.string() + ": " + e.what());
    }
    return parse_suite(doc);
}

auto evaluate_sample(const TaskSpec& task, std::string_view source, IoAdapter& io,
                     const EvalOptions& options) -> SampleResult {
    SampleResult r;
    auto started = std::chrono::steady_clock::now();
    auto finish = [&]() -> SampleResult {
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started)
                        .count();
        return r;
    };

    Pipeline pipeline;
    try {
        pipeline = parse(source);
    } catch (const ParseError& e) {
        r.detail = std::string("parse error: ") + e.what();
        return finish();
    }
    ValidationResult v = validate(pipeline);
    if (!v.ok()) {
        const auto& e = v.errors.front();
        r.detail = "validation error: " + to_string(e.location) + ": " +
                   std::string(validation_error_kind_name(e.kind)) + ": " + e.message;
        return finish();
    }
    r.parse = true;

    RunOptions run;
    run.sandboxed = options.sandboxed;
    run.while_cap = options.while_cap;
    run.deadline = started + options.time_limit;
    std::vector<Table> outputs;
    for (std::size_t k = 0; k < task.tests.size(); ++k) {
        std::string at = "test " + std::to_string(k) + ": ";
        try {
            outputs.push_back(run_pipeline(pipeline, task.tests[k].inputs, io, run));
        } catch (const RuntimeError& e) {
            r.detail = at + "runtime error: " + e.what();
            return finish();
        } catch (const InputError& e) {
            r.detail = at + "input error: " + e.what();
            return finish();
        } catch (const InternalError& e) {
            r.detail = at + "internal error: " + e.what();
            return finish();
        }
    }
    r.execute = true;

    bool unordered = task.order_insensitive || options.force_order_insensitive;
    for (std::size_t k = 0; k < task.tests.size(); ++k) {
        const Table& want = task.tests[k].expected;
        const Table& got = outputs[k];
        bool same = unordered ? table_equal_unordered(got, want) : table_equal(got, want);
        if (!same) {
            r.detail = "test " + std::to_string(k) + ": wrong output: expected " +
                       want.schema().to_string() + " with " + std::to_string(want.row_count()) +
                       " rows, got " + got.schema().to_string() + " with " +
                       std::to_string(got.row_count()) + " rows";
            return finish();
        }
    }
    r.correct = true;
    return finish();
}

auto task_accuracy(const std::vector<SampleResult>& results) -> bool {
    if (results.empty()) {
        return false;
    }
    auto correct = static_cast<std::size_t>(
        std::count_if(results.begin(), results.end(), [](const auto& s) { return s.correct; }));
    return 2 * correct >= results.size();
}

auto load_candidates(const fs::path& dir, const Suite& suite)
    -> std::map<std::string, std::vector<Candidate>> {
    std::map<std::string, std::vector<Candidate>> out;
    for (const auto& task : suite.tasks) {
        fs::path sub = dir / task.id;
        std::error_code ec;
        if (!fs::is_directory(sub, ec)) {
            continue;
        }
        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(sub)) {
            if (entry.is_regular_file() && entry.path().extension() == ".anka") {
                files.push_back(entry.path());
            }
        }
        std::sort(files.begin(), files.end(), [](const fs::path& a, const fs::path& b) {
            return natural_less(a.filename().string(), b.filename().string());
        });
        auto& list = out[task.id];
        for (const auto& f : files) {
            std::ifstream in(f, std::ios::binary);
            std::ostringstream buf;
            buf << in.rdbuf();
            list.push_back({f.filename().string(), buf.str()});
        }
    }
    return out;
}

auto Totals::parse_rate() const -> double { return ratio(parsed, samples); }
auto Totals::execution_rate() const -> double { return ratio(executed, samples); }
auto Totals::correctness_rate() const -> double { return ratio(correct, samples); }
auto Totals::task_accuracy() const -> double { return ratio(accurate_tasks, tasks); }

auto summarize(const std::vector<TaskReport>& tasks) -> Totals {
    Totals t;
    for (const auto& task : tasks) {
        ++t.tasks;
        t.accurate_tasks += task.accurate ? 1 : 0;
        for (const auto& s : task.samples) {
            ++t.samples;
            t.parsed += s.parse ? 1 : 0;
            t.executed += s.execute ? 1 : 0;
            t.correct += s.correct ? 1 : 0;
        }
    }
    return t;
}

auto run_suite(const Suite& suite, const std::map<std::string, std::vector<Candidate>>& candidates,
               IoAdapter& io, const EvalOptions& options, unsigned jobs) -> RunReport {
    RunReport report;
    report.suite = suite.name;

    struct Work {
        std::size_t task;
        const Candidate* candidate;
        SampleResult* slot;
    };
    std::vector<Work> work;
    report.tasks.reserve(suite.tasks.size());
    for (const auto& task : suite.tasks) {
        TaskReport tr{task.id, task.category, {}, false, false};
        auto it = candidates.find(task.id);
        if (it != candidates.end()) {
            tr.samples.resize(it->second.size());
        }
        report.tasks.push_back(std::move(tr));
    }
    for (std::size_t t = 0; t < suite.tasks.size(); ++t) {
        auto it = candidates.find(suite.tasks[t].id);
        if (it == candidates.end()) {
            continue;
        }
        for (std::size_t s = 0; s < it->second.size(); ++s) {
            work.push_back({t, &it->second[s], &report.tasks[t].samples[s]});
        }
    }

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < work.size(); i = next++) {
            const Work& w = work[i];
            *w.slot = evaluate_sample(suite.tasks[w.task], w.candidate->source, io, options);
            w.slot->sample = w.candidate->name;
        }
    };
    unsigned threads = std::max(1U, std::min<unsigned>(jobs, static_cast<unsigned>(work.size())));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned i = 0; i < threads; ++i) {
            pool.emplace_back(worker);
        }
    }

    for (auto& tr : report.tasks) {
        tr.no_samples = tr.samples.empty();
        tr.accurate = task_accuracy(tr.samples);
    }
    for (std::string_view cat : kCategories) {
        std::vector<TaskReport> in_cat;
        for (const auto& tr : report.tasks) {
            if (tr.category == cat) {
                in_cat.push_back(tr);
            }
        }
        if (!in_cat.empty()) {
            report.categories.emplace_back(std::string(cat), summarize(in_cat));
        }
    }
    report.overall = summarize(report.tasks);
    return report;
}

auto report_to_json(const RunReport& report, bool timings) -> ordered_json {
    ordered_json tasks = ordered_json::array();
    for (const auto& tr : report.tasks) {
        ordered_json samples = ordered_json::array();
        for (const auto& s : tr.samples) {
            ordered_json js = {{"sample", s.sample},
                               {"parse", s.parse},
                               {"execute", s.execute},
                               {"correct", s.correct}};
            if (!s.detail.empty()) {
                js["detail"] = s.detail;
            }
            if (timings) {
                js["seconds"] = s.seconds;
            }
            samples.push_back(std::move(js));
        }
        ordered_json jt = {{"id", tr.id}, {"category", tr.category}, {"accurate", tr.accurate}};
        if (tr.no_samples) {
            jt["flags"] = ordered_json::array({"no samples"});
        }
        jt["samples"] = std::move(samples);
        tasks.push_back(std::move(jt));
    }
    ordered_json cats = ordered_json::array();
    for (const auto& [name, totals] : report.categories) {
        ordered_json c = {{"category", name}};
        c.update(totals_json(totals));
        cats.push_back(std::move(c));
    }
    return {{"suite", report.suite},
            {"overall", totals_json(report.overall)},
            {"categories", std::move(cats)},
            {"tasks", std::move(tasks)}};
}

auto report_to_markdown(const RunReport& report) -> std::string {
    std::ostringstream out;
    out << "| Category | Tasks | Parse | Execution | Correctness | Task accuracy |\n";
    out << "|---|---:|---:|---:|---:|---:|\n";
    auto row = [&](const std::string& name, const Totals& t) {
        out << "| " << name << " | " << t.tasks << " | " << percent(t.parse_rate()) << " | "
            << percent(t.execution_rate()) << " | " << percent(t.correctness_rate()) << " | "
            << percent(t.task_accuracy()) << " |\n";
    };
    for (const auto& [name, totals] : report.categories) {
        row(name, totals);
    }
    row("**Overall**", report.overall);
    return out.str();
}

}  // namespace anka::bench
