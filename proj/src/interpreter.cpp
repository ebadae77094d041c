#include <anka/interpreter.hpp>
#include <anka/validator.hpp>

#include <memory>
#include <type_traits>

namespace anka {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

using TablePtr = std::shared_ptr<const Table>;

struct Frame {
    const Frame* parent = nullptr;
    std::map<std::string, TablePtr, std::less<>> datasets;
    std::map<std::string, RowRef, std::less<>> row_vars;

    [[nodiscard]] auto find(std::string_view name) const -> const TablePtr* {
        for (const Frame* f = this; f != nullptr; f = f->parent) {
            auto it = f->datasets.find(name);
            if (it != f->datasets.end()) {
                return &it->second;
            }
        }
        return nullptr;
    }

    [[nodiscard]] auto all_row_vars() const -> ops::RowVars {
        ops::RowVars out;
        for (const Frame* f = this; f != nullptr; f = f->parent) {
            for (const auto& [k, v] : f->row_vars) {
                out.emplace(k, v);
            }
        }
        return out;
    }
};

auto format_name(DataFormat f) -> std::string_view {
    return f == DataFormat::Json ? "JSON" : "CSV";
}

class Runner {
public:
    Runner(IoAdapter& io, const RunOptions& options)
        : io_(io), options_(options), budget_(options.deadline) {}

    void block(const Block& body, Frame& frame) {
        for (const auto& stmt : body) {
            budget_.check();
            try {
                statement(stmt, frame);
            } catch (RuntimeError& e) {
                e.attach_location(stmt.location);
                throw;
            }
        }
    }

private:
    auto table(const Frame& frame, const Name& name) const -> const Table& {
        const TablePtr* t = frame.find(name.text);
        if (t == nullptr) {
            throw InternalError("unknown dataset '" + name.text + "' at " +
                                to_string(name.location));
        }
        return **t;
    }

    static void bind(Frame& frame, const Name& target, Table t) {
        frame.datasets[target.text] = std::make_shared<const Table>(std::move(t));
    }

    auto scalar(const Expr& expr, const Frame& frame) -> Value {
        auto vars = frame.all_row_vars();
        return eval_expr(expr, EvalScope{{}, &vars});
    }

    auto bound(const Expr& expr, const Frame& frame, std::string_view what) -> std::int64_t {
        Value v = scalar(expr, frame);
        if (v.is_null()) {
            throw RuntimeError(RuntimeErrorKind::AssertionFailed,
                               std::string(what) + " evaluated to NULL");
        }
        if (v.type() != ValueType::Int) {
            throw InternalError(std::string(what) + " is not INT");
        }
        return v.as_int();
    }

    auto condition(const Expr& expr, const Frame& frame) -> bool {
        Value v = scalar(expr, frame);
        if (v.is_null()) {
            return false;
        }
        if (v.type() != ValueType::Bool) {
            throw InternalError("condition is not BOOL");
        }
        return v.as_bool();
    }

    void sandbox_guard(RuntimeErrorKind kind, std::string_view what) const {
        if (options_.sandboxed) {
            throw RuntimeError(kind, std::string(what) + " refused: sandboxed");
        }
    }

    void statement(const Statement& stmt, Frame& frame) {
        std::visit(
            overloaded{
                [&](const FilterStmt& s) {
                    auto vars = frame.all_row_vars();
                    bind(frame, s.target, ops::filter(table(frame, s.source), *s.predicate, vars,
                                                      budget_));
                },
                [&](const SelectStmt& s) {
                    std::vector<std::string> cols;
                    for (const auto& c : s.columns) {
                        cols.push_back(c.text);
                    }
                    bind(frame, s.target, ops::select(table(frame, s.source), cols));
                },
                [&](const DistinctStmt& s) {
                    bind(frame, s.target, ops::distinct(table(frame, s.source), budget_));
                },
                [&](const MapStmt& s) {
                    auto vars = frame.all_row_vars();
                    bind(frame, s.target,
                         ops::map_column(table(frame, s.source), s.column.text, *s.expr, vars,
                                         budget_));
                },
                [&](const RenameStmt& s) {
                    bind(frame, s.target, ops::rename(table(frame, s.source), s.from.text, s.to.text));
                },
                [&](const DropStmt& s) {
                    std::vector<std::string> cols;
                    for (const auto& c : s.columns) {
                        cols.push_back(c.text);
                    }
                    bind(frame, s.target, ops::drop(table(frame, s.source), cols));
                },
                [&](const AddColumnStmt& s) {
                    bind(frame, s.target, ops::add_column(table(frame, s.source), s.column.text,
                                                          scalar(*s.value, frame)));
                },
                [&](const AggregateStmt& s) {
                    std::vector<std::string> keys;
                    for (const auto& k : s.group_by) {
                        keys.push_back(k.text);
                    }
                    std::vector<ops::AggregateCall> calls;
                    for (const auto& c : s.computes) {
                        calls.push_back({c.fn, c.argument, c.alias.text});
                    }
                    auto vars = frame.all_row_vars();
                    bind(frame, s.target,
                         ops::aggregate(table(frame, s.source), keys, calls, vars, budget_));
                },
                [&](const SortStmt& s) {
                    bind(frame, s.target,
                         ops::sort(table(frame, s.source), s.column.text, s.direction));
                },
                [&](const LimitStmt& s) {
                    bind(frame, s.target,
                         ops::limit(table(frame, s.source), bound(*s.count, frame, "LIMIT count")));
                },
                [&](const SkipStmt& s) {
                    bind(frame, s.target,
                         ops::skip(table(frame, s.source), bound(*s.count, frame, "SKIP count")));
                },
                [&](const SliceStmt& s) {
                    std::int64_t from = bound(*s.from, frame, "SLICE start");
                    std::int64_t to = bound(*s.to, frame, "SLICE end");
                    bind(frame, s.target, ops::slice(table(frame, s.source), from, to));
                },
                [&](const JoinStmt& s) {
                    bind(frame, s.target,
                         ops::join(table(frame, s.left), table(frame, s.right), s.left_key.text,
                                   s.right_key.text, s.kind, budget_));
                },
                [&](const UnionStmt& s) {
                    bind(frame, s.target,
                         ops::union_all(table(frame, s.left), table(frame, s.right)));
                },
                [&](const ReadStmt& s) { bind(frame, s.target, read(s)); },
                [&](const WriteStmt& s) { write(s, table(frame, s.source)); },
                [&](const FetchStmt& s) { bind(frame, s.target, fetch(s)); },
                [&](const PostStmt& s) { post(s, table(frame, s.source)); },
                [&](const IfStmt& s) {
                    const Block* other = s.else_body ? &*s.else_body : nullptr;
                    Frame child{&frame, {}, {}};
                    if (condition(*s.condition, frame)) {
                        block(s.then_body, child);
                    } else if (other != nullptr) {
                        block(*other, child);
                    }
                    export_bindings(child, frame, branch_exports(s.then_body, other));
                },
                [&](const TryStmt& s) {
                    Frame child{&frame, {}, {}};
                    try {
                        block(s.body, child);
                    } catch (const RuntimeError& e) {
                        if (e.kind() == RuntimeErrorKind::Timeout) {
                            throw;
                        }
                        child.datasets.clear();
                        block(s.handler, child);
                    }
                    export_bindings(child, frame, branch_exports(s.body, &s.handler));
                },
                [&](const ForEachStmt& s) {
                    TablePtr src = *frame.find(s.source.text);
                    for (const auto& row : src->rows()) {
                        budget_.tick();
                        Frame child{&frame, {}, {}};
                        child.row_vars[s.row_var.text] = RowRef{&src->schema(), &row};
                        block(s.body, child);
                    }
                },
                [&](const WhileStmt& s) {
                    std::uint64_t iterations = 0;
                    while (condition(*s.condition, frame)) {
                        if (iterations == options_.while_cap) {
                            throw RuntimeError(RuntimeErrorKind::AssertionFailed,
                                               "WHILE exceeded " +
                                                   std::to_string(options_.while_cap) +
                                                   " iterations");
                        }
                        ++iterations;
                        budget_.tick();
                        Frame child{&frame, {}, {}};
                        block(s.body, child);
                    }
                },
            },
            stmt.node);
    }

    static void export_bindings(const Frame& child, Frame& parent,
                                const std::set<std::string>& names) {
        for (const auto& name : names) {
            auto it = child.datasets.find(name);
            if (it != child.datasets.end()) {
                parent.datasets[name] = it->second;
            }
        }
    }

    auto decode(std::string_view bytes, DataFormat format, const Schema& schema) -> Table {
        try {
            return format == DataFormat::Json ? table_from_json(bytes, schema)
                                              : table_from_csv(bytes, schema);
        } catch (const DataFormatError& e) {
            throw RuntimeError(RuntimeErrorKind::ConversionError, e.what());
        }
    }

    auto read(const ReadStmt& s) -> Table {
        sandbox_guard(RuntimeErrorKind::IoError, "READ \"" + s.path + "\"");
        std::string bytes;
        try {
            bytes = io_.read_file(s.path);
        } catch (const IoFailure& e) {
            throw RuntimeError(RuntimeErrorKind::IoError, e.what());
        }
        return decode(bytes, s.format, s.schema);
    }

    void write(const WriteStmt& s, const Table& t) {
        sandbox_guard(RuntimeErrorKind::IoError, "WRITE \"" + s.path + "\"");
        std::string bytes = s.format == DataFormat::Json ? table_to_json(t) : table_to_csv(t);
        try {
            io_.write_file(s.path, bytes);
        } catch (const IoFailure& e) {
            throw RuntimeError(RuntimeErrorKind::IoError,
                               std::string(e.what()) + " (" + std::string(format_name(s.format)) +
                                   ")");
        }
    }

    static void check_status(const HttpResponse& r, const std::string& url) {
        if (r.status < 200 || r.status > 299) {
            throw RuntimeError(RuntimeErrorKind::HttpError,
                               "HTTP status " + std::to_string(r.status) + " from " + url);
        }
    }

    auto fetch(const FetchStmt& s) -> Table {
        sandbox_guard(RuntimeErrorKind::HttpError, "FETCH \"" + s.url + "\"");
        HttpResponse r;
        try {
            r = io_.http_get(s.url);
        } catch (const IoFailure& e) {
            throw RuntimeError(RuntimeErrorKind::HttpError, e.what());
        }
        check_status(r, s.url);
        return decode(r.body, DataFormat::Json, s.schema);
    }

    void post(const PostStmt& s, const Table& t) {
        sandbox_guard(RuntimeErrorKind::HttpError, "POST \"" + s.url + "\"");
        HttpResponse r;
        try {
            r = io_.http_post(s.url, table_to_json(t), "application/json");
        } catch (const IoFailure& e) {
            throw RuntimeError(RuntimeErrorKind::HttpError, e.what());
        }
        check_status(r, s.url);
    }

    IoAdapter& io_;
    const RunOptions& options_;
    Budget budget_;
};

}  // namespace

auto runtime_error_kind_name(RuntimeErrorKind kind) -> std::string_view {
    switch (kind) {
        case RuntimeErrorKind::DivisionByZero: return "DivisionByZero";
        case RuntimeErrorKind::IoError: return "IoError";
        case RuntimeErrorKind::HttpError: return "HttpError";
        case RuntimeErrorKind::ConversionError: return "ConversionError";
        case RuntimeErrorKind::AssertionFailed: return "AssertionFailed";
        case RuntimeErrorKind::Timeout: return "Timeout";
    }
    return "?";
}

RuntimeError::RuntimeError(RuntimeErrorKind kind, std::string message,
                           std::optional<SourceLocation> location)
    : std::runtime_error(message),
      kind_(kind),
      message_(std::move(message)),
      location_(location) {
    refresh();
}

void RuntimeError::attach_location(SourceLocation loc) {
    if (!location_) {
        location_ = loc;
        refresh();
    }
}

void RuntimeError::refresh() {
    what_.clear();
    if (location_) {
        what_ = to_string(*location_) + ": ";
    }
    what_ += std::string(runtime_error_kind_name(kind_)) + ": " + message_;
}

void Budget::check() const {
    if (deadline_ && std::chrono::steady_clock::now() >= *deadline_) {
        throw RuntimeError(RuntimeErrorKind::Timeout, "wall-clock limit exceeded");
    }
}

void check_inputs(const Pipeline& pipeline, const InputTables& inputs) {
    for (const auto& in : pipeline.inputs) {
        auto it = inputs.find(in.name.text);
        if (it == inputs.end()) {
            throw InputError("no table supplied for INPUT '" + in.name.text + "'");
        }
        if (it->second.schema() != in.schema) {
            throw InputError("INPUT '" + in.name.text + "' expects " + in.schema.to_string() +
                             ", got " + it->second.schema().to_string());
        }
    }
}

auto run_pipeline(const Pipeline& pipeline, const InputTables& inputs, IoAdapter& io,
                  const RunOptions& options) -> Table {
    check_inputs(pipeline, inputs);
    Frame root;
    for (const auto& in : pipeline.inputs) {
        root.datasets[in.name.text] = std::make_shared<const Table>(inputs.find(in.name.text)->second);
    }
    Runner runner(io, options);
    for (const auto& step : pipeline.steps) {
        runner.block(step.body, root);
    }
    const TablePtr* out = root.find(pipeline.output.text);
    if (out == nullptr) {
        throw InternalError("OUTPUT '" + pipeline.output.text + "' is not bound");
    }
    return **out;
}

}  // namespace anka
