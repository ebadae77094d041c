#include "helpers.hpp"
#include "recording_io.hpp"

#include <gtest/gtest.h>

using namespace anka;
using namespace anka::unit;

namespace {

auto eval(const std::string& text) -> Value {
    return eval_expr(*parse_expression(text), EvalScope{});
}

auto eval_error(const std::string& text) -> std::optional<RuntimeErrorKind> {
    try {
        eval(text);
    } catch (const RuntimeError& e) {
        return e.kind();
    }
    return std::nullopt;
}

const Schema kOrders = schema({{"order_id", ValueType::Int},
                               {"customer", ValueType::String},
                               {"amount", ValueType::Decimal},
                               {"date", ValueType::Date}});

auto orders() -> Table {
    return table(kOrders, {{Value(1), Value("alice"), dec("1500.00"), date("2024-01-01")},
                           {Value(2), Value("bob"), dec("800.00"), date("2024-01-02")},
                           {Value(3), Value("alice"), dec("2000.00"), date("2024-01-03")}});
}

const std::string kOrdersType = "TABLE[order_id: INT, customer: STRING, amount: DECIMAL, date: DATE]";

auto column(const Table& t, std::size_t c) -> std::vector<std::string> {
    std::vector<std::string> out;
    for (const auto& row : t.rows()) {
        out.push_back(row[c].to_string());
    }
    return out;
}

using Strings = std::vector<std::string>;

}  // namespace

TEST(Eval, Builtins) {
    EXPECT_EQ(eval("UPPER(\"abc\")"), Value("ABC"));
    EXPECT_EQ(eval("LOWER(\"AbC\")"), Value("abc"));
    EXPECT_EQ(eval("TRIM(\"  x y \")"), Value("x y"));
    EXPECT_EQ(eval("LENGTH(\"héllo\")"), Value(5));
    EXPECT_EQ(eval("SUBSTRING(\"hello\", 1, 3)"), Value("ell"));
    EXPECT_EQ(eval("SUBSTRING(\"hello\", 3, 10)"), Value("lo"));
    EXPECT_EQ(eval("SUBSTRING(\"hello\", 9, 1)"), Value(""));
    EXPECT_EQ(eval("REPLACE(\"a-b-c\", \"-\", \"+\")"), Value("a+b+c"));
    EXPECT_EQ(eval("CONCAT(\"a\", \"b\", \"c\")"), Value("abc"));
    EXPECT_EQ(eval("TO_STRING(1.50)"), Value("1.50"));
    EXPECT_EQ(eval("TO_INT(\" 42 \")"), Value(42));
    EXPECT_EQ(eval("TO_DECIMAL(\"3.25\")").as_decimal().to_string(), "3.25");
    EXPECT_EQ(eval("YEAR(DATE \"2024-03-09\")"), Value(2024));
    EXPECT_EQ(eval("MONTH(DATE \"2024-03-09\")"), Value(3));
    EXPECT_EQ(eval("DAY(DATETIME \"2024-03-09T23:00:00\")"), Value(9));
}

TEST(Eval, Arithmetic) {
    EXPECT_EQ(eval("7 / 2"), Value(3));
    EXPECT_EQ(eval("-7 / 2"), Value(-3));
    EXPECT_EQ(eval("7.0 / 2").as_decimal().to_string(), "3.50000");
    EXPECT_EQ(eval("1500.00 * 0.08").as_decimal().to_string(), "120.0000");
    EXPECT_EQ(eval("1 + 0.5").as_decimal().to_string(), "1.5");
    EXPECT_EQ(eval("2 * 3 - 1"), Value(5));
}

TEST(Eval, ErrorsAreTyped) {
    EXPECT_EQ(eval_error("1 / 0"), RuntimeErrorKind::DivisionByZero);
    EXPECT_EQ(eval_error("1.5 / 0.0"), RuntimeErrorKind::DivisionByZero);
    EXPECT_EQ(eval_error("TO_INT(\"x\")"), RuntimeErrorKind::ConversionError);
    EXPECT_EQ(eval_error("TO_DECIMAL(\"1e5\")"), RuntimeErrorKind::ConversionError);
    EXPECT_EQ(eval_error("SUBSTRING(\"abc\", -1, 2)"), RuntimeErrorKind::ConversionError);
    EXPECT_EQ(eval_error("9223372036854775807 + 1"), RuntimeErrorKind::ConversionError);
}

TEST(Eval, NullPropagationAndThreeValuedLogic) {
    EXPECT_TRUE(eval("NULL + 1").is_null());
    EXPECT_TRUE(eval("NULL > 1").is_null());
    EXPECT_TRUE(eval("UPPER(NULL)").is_null());
    EXPECT_EQ(eval("NULL AND FALSE"), Value(false));
    EXPECT_TRUE(eval("NULL AND TRUE").is_null());
    EXPECT_EQ(eval("NULL OR TRUE"), Value(true));
    EXPECT_TRUE(eval("NOT NULL").is_null());
    // Short circuit skips the failing operand.
    EXPECT_EQ(eval("FALSE AND 1 / 0 > 1"), Value(false));
    EXPECT_EQ(eval("TRUE OR 1 / 0 > 1"), Value(true));
}

TEST(Interpreter, SalesPipeline) {
    std::string src = "PIPELINE transform_sales:\n  INPUT orders: " + kOrdersType +
                      "\n  STEP a:\n    FILTER orders WHERE amount > 1000 INTO large_orders\n"
                      "  STEP b:\n    MAP large_orders WITH tax => amount * 0.08 INTO with_tax\n"
                      "  STEP c:\n    AGGREGATE with_tax GROUP_BY customer COMPUTE SUM(amount) AS total, COUNT() AS num_orders INTO summary\n"
                      "  OUTPUT summary\n";
    Table out = run(src, {{"orders", orders()}});
    Table want = table(schema({{"customer", ValueType::String}, {"total", ValueType::Decimal}, {"num_orders", ValueType::Int}}),
                       {{Value("alice"), dec("3500.00"), Value(2)}});
    EXPECT_TRUE(table_equal(out, want)) << format_table(out);
    EXPECT_EQ(out.at(0, 1).to_string(), "3500.00");
}

TEST(Interpreter, MapTax) {
    Table out = run(program(kOrdersType, "    FILTER t WHERE amount > 1000 INTO big\n    MAP big WITH tax => amount * 0.08 INTO r"),
                    {{"t", orders()}});
    EXPECT_EQ(column(out, 4), (Strings{"120.0000", "160.0000"}));
}

TEST(Interpreter, FilterEdgeCases) {
    Table empty = table(kOrders, {});
    Table out = run(program(kOrdersType, "    FILTER t WHERE amount > 1000 INTO r"), {{"t", empty}});
    EXPECT_EQ(out.row_count(), 0u);
    EXPECT_EQ(out.schema(), kOrders);
    EXPECT_TRUE(table_equal(run(program(kOrdersType, "    FILTER t WHERE TRUE INTO r"), {{"t", orders()}}), orders()));
    EXPECT_EQ(run(program(kOrdersType, "    FILTER t WHERE FALSE INTO r"), {{"t", orders()}}).row_count(), 0u);
    EXPECT_EQ(column(run(program(kOrdersType, "    FILTER t WHERE amount > 1000 INTO r"), {{"t", orders()}}), 2),
              (Strings{"1500.00", "2000.00"}));
}

TEST(Interpreter, FilterDropsNullPredicates) {
    Schema s = schema({{"a", ValueType::Int}});
    Table t = table(s, {{Value(1)}, {Value()}, {Value(3)}});
    Table out = run(program("TABLE[a: INT]", "    FILTER t WHERE a > 0 INTO r"), {{"t", t}});
    EXPECT_EQ(column(out, 0), (Strings{"1", "3"}));
    Table nulls = run(program("TABLE[a: INT]", "    FILTER t WHERE a == NULL INTO r"), {{"t", t}});
    EXPECT_EQ(nulls.row_count(), 0u);
}

TEST(Interpreter, MapConstantAndEmpty) {
    Schema s = schema({{"a", ValueType::Int}});
    Table out = run(program("TABLE[a: INT]", "    MAP t WITH one => 1 INTO r"), {{"t", table(s, {{Value(5)}, {Value(6)}})}});
    EXPECT_EQ(column(out, 1), (Strings{"1", "1"}));
    Table none = run(program("TABLE[a: INT]", "    MAP t WITH one => 1 INTO r"), {{"t", table(s, {})}});
    EXPECT_EQ(none.schema().to_string(), "TABLE[a: INT, one: INT]");
}

TEST(Interpreter, DivisionByZeroInMapIsLocated) {
    Schema s = schema({{"a", ValueType::Int}});
    try {
        run(program("TABLE[a: INT]", "    MAP t WITH q => 1 / 0 INTO r"), {{"t", table(s, {{Value(1)}})}});
        FAIL();
    } catch (const RuntimeError& e) {
        EXPECT_EQ(e.kind(), RuntimeErrorKind::DivisionByZero);
        ASSERT_TRUE(e.location());
        EXPECT_EQ(e.location()->line, 4u);
        EXPECT_EQ(e.location()->column, 5u);
        EXPECT_EQ(std::string(e.what()).rfind("4:5: DivisionByZero", 0), 0u) << e.what();
    }
}

TEST(Interpreter, Aggregate) {
    Schema s = schema({{"customer", ValueType::String}, {"amount", ValueType::Int}});
    Table t = table(s, {{Value("alice"), Value(10)}, {Value("bob"), Value(20)}, {Value("alice"), Value(30)}});
    Table out = run(program("TABLE[customer: STRING, amount: INT]",
                            "    AGGREGATE t GROUP_BY customer COMPUTE SUM(amount) AS total INTO r"),
                    {{"t", t}});
    EXPECT_EQ(column(out, 0), (Strings{"alice", "bob"}));
    EXPECT_EQ(column(out, 1), (Strings{"40", "20"}));

    Table empty = run(program("TABLE[customer: STRING, amount: INT]",
                              "    AGGREGATE t COMPUTE COUNT() AS n, SUM(amount) AS s, MIN(customer) AS m INTO r"),
                      {{"t", table(s, {})}});
    ASSERT_EQ(empty.row_count(), 1u);
    EXPECT_EQ(empty.at(0, 0), Value(0));
    EXPECT_TRUE(empty.at(0, 1).is_null());
    EXPECT_TRUE(empty.at(0, 2).is_null());
}

TEST(Interpreter, AggregateSkipsNullsAndAverages) {
    Schema s = schema({{"g", ValueType::String}, {"v", ValueType::Decimal}});
    Table t = table(s, {{Value("x"), dec("1.00")}, {Value("x"), Value()}, {Value("x"), dec("2.00")},
                        {Value("y"), Value()}});
    Table out = run(program("TABLE[g: STRING, v: DECIMAL]",
                            "    AGGREGATE t GROUP_BY g COMPUTE COUNT() AS n, AVG(v) AS avg, MIN(v) AS lo INTO r"),
                    {{"t", t}});
    EXPECT_EQ(column(out, 1), (Strings{"3", "1"}));
    EXPECT_EQ(column(out, 2), (Strings{"1.500000", "null"}));
    EXPECT_EQ(column(out, 3), (Strings{"1.00", "null"}));
}

TEST(Interpreter, AggregateSumOverflow) {
    Schema s = schema({{"v", ValueType::Int}});
    Table t = table(s, {{Value(INT64_MAX)}, {Value(1)}});
    try {
        run(program("TABLE[v: INT]", "    AGGREGATE t COMPUTE SUM(v) AS s INTO r"), {{"t", t}});
        FAIL();
    } catch (const RuntimeError& e) {
        EXPECT_EQ(e.kind(), RuntimeErrorKind::ConversionError);
    }
}

TEST(Interpreter, OrderingOperators) {
    Schema s = schema({{"a", ValueType::Int}, {"b", ValueType::String}});
    Table t = table(s, {{Value(3), Value("p")}, {Value(1), Value("x")}, {Value(), Value("n")},
                        {Value(1), Value("y")}, {Value(2), Value("q")}});
    const std::string type = "TABLE[a: INT, b: STRING]";
    EXPECT_EQ(column(run(program(type, "    SORT t BY a ASC INTO r"), {{"t", t}}), 1),
              (Strings{"x", "y", "q", "p", "n"}));
    EXPECT_EQ(column(run(program(type, "    SORT t BY a DESC INTO r"), {{"t", t}}), 1),
              (Strings{"p", "q", "x", "y", "n"}));
    EXPECT_EQ(column(run(program(type, "    LIMIT t 2 INTO r"), {{"t", t}}), 1), (Strings{"p", "x"}));
    EXPECT_EQ(run(program(type, "    LIMIT t 99 INTO r"), {{"t", t}}).row_count(), 5u);
    EXPECT_EQ(column(run(program(type, "    SKIP t 3 INTO r"), {{"t", t}}), 1), (Strings{"y", "q"}));
    EXPECT_EQ(column(run(program(type, "    SLICE t FROM 1 TO 3 INTO r"), {{"t", t}}), 1), (Strings{"x", "n"}));
    EXPECT_EQ(run(program(type, "    SLICE t FROM 4 TO 40 INTO r"), {{"t", t}}).row_count(), 1u);
}

TEST(Interpreter, ComputedBoundsAreCheckedAtRuntime) {
    Schema s = schema({{"a", ValueType::Int}});
    Table t = table(s, {{Value(1)}});
    for (const char* stmt : {"    LIMIT t 2 - 5 INTO r", "    SLICE t FROM 3 TO 0 + 1 INTO r"}) {
        try {
            run(program("TABLE[a: INT]", stmt), {{"t", t}});
            FAIL() << stmt;
        } catch (const RuntimeError& e) {
            EXPECT_EQ(e.kind(), RuntimeErrorKind::AssertionFailed) << stmt;
        }
    }
}

TEST(Interpreter, ProjectionOperators) {
    Schema s = schema({{"a", ValueType::Int}, {"b", ValueType::String}});
    Table t = table(s, {{Value(1), Value("x")}, {Value(1), Value("x")}, {Value(2), Value("x")}});
    const std::string type = "TABLE[a: INT, b: STRING]";
    Table distinct = run(program(type, "    DISTINCT t INTO r"), {{"t", t}});
    EXPECT_EQ(column(distinct, 0), (Strings{"1", "2"}));
    Table sel = run(program(type, "    SELECT t COLUMNS b, a INTO r"), {{"t", t}});
    EXPECT_EQ(sel.schema().to_string(), "TABLE[b: STRING, a: INT]");
    Table ren = run(program(type, "    RENAME t COLUMN a TO n INTO r"), {{"t", t}});
    EXPECT_EQ(ren.schema().to_string(), "TABLE[n: INT, b: STRING]");
    Table drop = run(program(type, "    DROP t COLUMNS a INTO r"), {{"t", t}});
    EXPECT_EQ(drop.schema().to_string(), "TABLE[b: STRING]");
    Table add = run(program(type, "    ADD_COLUMN t WITH c => DATE \"2024-01-01\" INTO r"), {{"t", t}});
    EXPECT_EQ(column(add, 2), (Strings{"2024-01-01", "2024-01-01", "2024-01-01"}));
    Table neg = run(program(type, "    ADD_COLUMN t WITH c => -2.5 INTO r"), {{"t", t}});
    EXPECT_EQ(column(neg, 2), (Strings{"-2.5", "-2.5", "-2.5"}));
}

TEST(Interpreter, Joins) {
    std::string src = "PIPELINE p:\n  INPUT l: TABLE[k: INT]\n  INPUT rr: TABLE[rk: INT, v: STRING]\n  STEP s:\n"
                      "    JOIN l WITH rr ON k == rk INTO j\n    LEFT_JOIN l WITH rr ON k == rk INTO lj\n"
                      "    UNION j WITH j INTO r\n  OUTPUT OUT\n";
    Schema ls = schema({{"k", ValueType::Int}});
    Schema rs = schema({{"rk", ValueType::Int}, {"v", ValueType::String}});
    InputTables inputs = {{"l", table(ls, {{Value(1)}, {Value(2)}, {Value()}})},
                          {"rr", table(rs, {{Value(2), Value("x")}, {Value(2), Value("y")}, {Value(), Value("z")}})}};
    auto out = [&](const std::string& name) {
        std::string s = src;
        s.replace(s.rfind("OUT"), 3, name);
        return run(s, inputs);
    };
    Table j = out("j");
    EXPECT_EQ(j.schema().to_string(), "TABLE[k: INT, v: STRING]");
    EXPECT_EQ(column(j, 1), (Strings{"x", "y"}));
    EXPECT_EQ(column(out("lj"), 1), (Strings{"null", "x", "y", "null"}));
    EXPECT_EQ(out("r").row_count(), 4u);

    InputTables none = {{"l", table(ls, {{Value(5)}})}, {"rr", table(rs, {{Value(6), Value("q")}})}};
    std::string s = src;
    s.replace(s.rfind("OUT"), 3, "lj");
    Table padded = run(s, none);
    EXPECT_EQ(padded.row_count(), 1u);
    EXPECT_TRUE(padded.at(0, 1).is_null());
    s = src;
    s.replace(s.rfind("OUT"), 3, "j");
    EXPECT_EQ(run(s, none).row_count(), 0u);
}

TEST(Interpreter, JoinIntWithDecimalKeys) {
    std::string src = "PIPELINE p:\n  INPUT l: TABLE[k: INT]\n  INPUT rr: TABLE[rk: DECIMAL]\n  STEP s:\n"
                      "    JOIN l WITH rr ON k == rk INTO j\n  OUTPUT j\n";
    InputTables inputs = {{"l", table(schema({{"k", ValueType::Int}}), {{Value(2)}})},
                          {"rr", table(schema({{"rk", ValueType::Decimal}}), {{dec("2.00")}, {dec("2.5")}})}};
    EXPECT_EQ(run(src, inputs).row_count(), 1u);
}

TEST(ControlFlow, IfTakesOneBranch) {
    Schema s = schema({{"a", ValueType::Int}});
    Table t = table(s, {{Value(1)}, {Value(2)}});
    auto body = [](const std::string& cond) {
        return "    IF " + cond + " THEN\n      FILTER t WHERE a > 1 INTO r\n    ELSE\n      FILTER t WHERE a < 2 INTO r\n    END_IF";
    };
    EXPECT_EQ(column(run(program("TABLE[a: INT]", body("TRUE")), {{"t", t}}), 0), (Strings{"2"}));
    EXPECT_EQ(column(run(program("TABLE[a: INT]", body("1 > 2")), {{"t", t}}), 0), (Strings{"1"}));
    EXPECT_EQ(column(run(program("TABLE[a: INT]", body("NULL")), {{"t", t}}), 0), (Strings{"1"}));
}

TEST(ControlFlow, TryFallsBackOnRuntimeError) {
    Schema s = schema({{"a", ValueType::Int}, {"b", ValueType::Int}});
    Table t = table(s, {{Value(4), Value(2)}, {Value(1), Value(0)}});
    std::string src = program("TABLE[a: INT, b: INT]",
                              "    TRY\n      MAP t WITH ratio => a / b INTO r\n    ON_ERROR\n      ADD_COLUMN t WITH ratio => 0 INTO r\n    END_TRY");
    EXPECT_EQ(column(run(src, {{"t", t}}), 2), (Strings{"0", "0"}));
    Table ok = table(s, {{Value(4), Value(2)}});
    EXPECT_EQ(column(run(src, {{"t", ok}}), 2), (Strings{"2"}));
}

TEST(ControlFlow, TryDiscardsPartialBindings) {
    Schema s = schema({{"a", ValueType::Int}});
    Table t = table(s, {{Value(0)}});
    std::string src = program("TABLE[a: INT]",
                              "    TRY\n      DISTINCT t INTO r\n      MAP t WITH q => 1 / a INTO boom\n"
                              "    ON_ERROR\n      FILTER t WHERE FALSE INTO r\n    END_TRY");
    EXPECT_EQ(run(src, {{"t", t}}).row_count(), 0u);
}

TEST(ControlFlow, WhileFalseAndIterationCap) {
    Schema s = schema({{"a", ValueType::Int}});
    Table t = table(s, {{Value(1)}});
    EXPECT_TRUE(table_equal(
        run(program("TABLE[a: INT]", "    WHILE FALSE DO\n      DISTINCT t INTO w\n    END_WHILE\n    DISTINCT t INTO r"), {{"t", t}}),
        t));
    RunOptions options;
    options.while_cap = 25;
    try {
        run(program("TABLE[a: INT]", "    WHILE TRUE DO\n      DISTINCT t INTO w\n    END_WHILE\n    DISTINCT t INTO r"),
            {{"t", t}}, options);
        FAIL();
    } catch (const RuntimeError& e) {
        EXPECT_EQ(e.kind(), RuntimeErrorKind::AssertionFailed);
        EXPECT_NE(e.message().find("25"), std::string::npos) << e.message();
    }
}

TEST(ControlFlow, DeadlineRaisesUncatchableTimeout) {
    Schema s = schema({{"a", ValueType::Int}});
    Table t = table(s, {{Value(1)}});
    RunOptions options;
    options.while_cap = 1'000'000'000;
    options.deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(50);
    std::string src = program("TABLE[a: INT]",
                              "    TRY\n      WHILE TRUE DO\n        DISTINCT t INTO w\n      END_WHILE\n      DISTINCT t INTO r\n"
                              "    ON_ERROR\n      DISTINCT t INTO r\n    END_TRY");
    try {
        run(src, {{"t", t}}, options);
        FAIL();
    } catch (const RuntimeError& e) {
        EXPECT_EQ(e.kind(), RuntimeErrorKind::Timeout);
    }
}

TEST(ControlFlow, ForEachRunsPerRow) {
    Schema s = schema({{"name", ValueType::String}});
    Table t = table(s, {{Value("a")}, {Value("b")}, {Value("c")}});
    Pipeline p = parse(program("TABLE[name: STRING]",
                               "    FOR_EACH row IN t DO\n      FILTER t WHERE name == row.name INTO one\n"
                               "      POST one TO \"http://example.test/items\"\n    END_FOR\n    DISTINCT t INTO r"));
    ASSERT_TRUE(validate(p).ok());
    gen::RecordingIoAdapter io;
    run_pipeline(p, {{"t", t}}, io);
    ASSERT_EQ(io.calls, 3);
    EXPECT_EQ(io.posted.at("http://example.test/items"), "[{\"name\":\"c\"}]");
}

TEST(Interpreter, InputsAreCheckedBeforeRunning) {
    Pipeline p = parse(program("TABLE[a: INT]", "    DISTINCT t INTO r"));
    DenyAllIoAdapter io;
    EXPECT_THROW(run_pipeline(p, {}, io), InputError);
    EXPECT_THROW(run_pipeline(p, {{"t", table(schema({{"a", ValueType::String}}), {})}}, io), InputError);
}

TEST(Interpreter, InputsAreNotModified) {
    Table before = orders();
    InputTables inputs = {{"orders", before}};
    std::string src = "PIPELINE p:\n  INPUT orders: " + kOrdersType +
                      "\n  STEP s:\n    SORT orders BY amount DESC INTO a\n    MAP a WITH x => 1 INTO r\n  OUTPUT r\n";
    run(src, inputs);
    EXPECT_TRUE(table_equal(inputs.at("orders"), before));
    EXPECT_EQ(format_table(inputs.at("orders")), format_table(orders()));
}

TEST(Interpreter, SandboxRefusesIo) {
    Pipeline p = parse(program("TABLE[a: INT]",
                               "    FETCH \"http://example.test/x\" TABLE[a: INT] INTO r"));
    gen::RecordingIoAdapter io;
    RunOptions options;
    options.sandboxed = true;
    try {
        run_pipeline(p, {{"t", table(schema({{"a", ValueType::Int}}), {})}}, io, options);
        FAIL();
    } catch (const RuntimeError& e) {
        EXPECT_EQ(e.kind(), RuntimeErrorKind::HttpError);
        EXPECT_NE(e.message().find("sandboxed"), std::string::npos);
    }
    Pipeline w = parse(program("TABLE[a: INT]", "    WRITE t TO \"out.json\" AS JSON\n    DISTINCT t INTO r"));
    try {
        run_pipeline(w, {{"t", table(schema({{"a", ValueType::Int}}), {})}}, io, options);
        FAIL();
    } catch (const RuntimeError& e) {
        EXPECT_EQ(e.kind(), RuntimeErrorKind::IoError);
    }
    EXPECT_EQ(io.calls, 0);
}

TEST(Interpreter, ReadAndWriteThroughAdapter) {
    gen::RecordingIoAdapter io;
    io.files["in.csv"] = "a,b\n1,x\n2,\"y,z\"\n";
    Pipeline p = parse(program("TABLE[a: INT]",
                               "    READ \"in.csv\" AS CSV TABLE[a: INT, b: STRING] INTO raw\n"
                               "    WRITE raw TO \"out.json\" AS JSON\n    SELECT raw COLUMNS b INTO r"));
    Table out = run_pipeline(p, {{"t", table(schema({{"a", ValueType::Int}}), {})}}, io);
    EXPECT_EQ(column(out, 0), (Strings{"x", "y,z"}));
    EXPECT_EQ(io.files.at("out.json"), "[{\"a\":1,\"b\":\"x\"},{\"a\":2,\"b\":\"y,z\"}]");
}

TEST(Interpreter, BadReadDataIsIoError) {
    gen::RecordingIoAdapter io;
    io.files["in.json"] = "[{\"a\": \"x\"}]";
    Pipeline p = parse(program("TABLE[a: INT]", "    READ \"in.json\" AS JSON TABLE[a: INT] INTO r"));
    try {
        run_pipeline(p, {{"t", table(schema({{"a", ValueType::Int}}), {})}}, io);
        FAIL();
    } catch (const RuntimeError& e) {
        EXPECT_TRUE(e.kind() == RuntimeErrorKind::IoError || e.kind() == RuntimeErrorKind::ConversionError);
    }
}

TEST(Interpreter, Deterministic) {
    std::string src = program(kOrdersType, "    AGGREGATE t GROUP_BY customer COMPUTE AVG(amount) AS m INTO r");
    EXPECT_EQ(format_table(run(src, {{"t", orders()}})), format_table(run(src, {{"t", orders()}})));
}
