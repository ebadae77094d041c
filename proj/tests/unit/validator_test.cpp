#include "helpers.hpp"

#include <gtest/gtest.h>

using namespace anka;
using namespace anka::unit;
using K = ValidationErrorKind;

namespace {

const std::string kTable = "TABLE[a: INT, s: STRING, d: DECIMAL]";

auto kinds_of(const std::string& body, const std::string& output = "r") -> std::vector<K> {
    return validation_kinds(program(kTable, body, output));
}

auto only(K k) -> std::vector<K> {
    return {k};
}

}  // namespace

TEST(Validator, SalesPipelineSchemas) {
    std::string src = R"(PIPELINE transform_sales:
  INPUT orders: TABLE[order_id: INT, customer: STRING, amount: DECIMAL, date: DATE]
  STEP filter_large:
    FILTER orders WHERE amount > 1000 INTO large_orders
  STEP add_tax:
    MAP large_orders WITH tax => amount * 0.08 INTO with_tax
  STEP summarize:
    AGGREGATE with_tax GROUP_BY customer COMPUTE SUM(amount) AS total, COUNT() AS num_orders INTO summary
  OUTPUT summary
)";
    ValidationResult v = validate(parse(src));
    ASSERT_TRUE(v.ok());
    const Binding* with_tax = v.environment.find("with_tax");
    ASSERT_NE(with_tax, nullptr);
    EXPECT_EQ(with_tax->schema.to_string(),
              "TABLE[order_id: INT, customer: STRING, amount: DECIMAL, date: DATE, tax: DECIMAL]");
    EXPECT_EQ(with_tax->statement, "MAP");
    EXPECT_EQ(v.output_schema->to_string(), "TABLE[customer: STRING, total: DECIMAL, num_orders: INT]");
    ASSERT_EQ(v.environment.bindings().size(), 4u);
    EXPECT_EQ(v.environment.bindings()[0].origin, BindingOrigin::Input);
}

TEST(Validator, DuplicateBindingAtSecondInto) {
    std::string src = program(kTable, "    FILTER t WHERE a > 1 INTO r\n  STEP again:\n    FILTER t WHERE a > 2 INTO r");
    auto errors = validate(parse(src)).errors;
    ASSERT_EQ(errors.size(), 1u);
    EXPECT_EQ(errors[0].kind, K::DuplicateBinding);
    EXPECT_EQ(errors[0].location.line, 6u);
    EXPECT_EQ(kinds_of("    DISTINCT t INTO t").front(), K::DuplicateBinding);
}

TEST(Validator, UnknownNames) {
    EXPECT_EQ(kinds_of("    FILTER t WHERE missing_col > 1 INTO r"), only(K::UnknownColumn));
    EXPECT_EQ(kinds_of("    FILTER nope WHERE a > 1 INTO r"), only(K::UnknownDataset));
    EXPECT_EQ(kinds_of("    SELECT t COLUMNS a, zz INTO r"), only(K::UnknownColumn));
    EXPECT_EQ(kinds_of("    DISTINCT t INTO r", "zzz"), only(K::OutputUndefined));
}

TEST(Validator, CollectsEveryError) {
    auto k = kinds_of("    FILTER t WHERE x > 1 INTO r\n    MAP t WITH b => \"a\" + 1 INTO q\n    DISTINCT nope INTO w");
    EXPECT_EQ(k, (std::vector<K>{K::UnknownColumn, K::TypeMismatch, K::UnknownDataset}));
}

TEST(Validator, NoCascadeFromPoisonedDataset) {
    // `r` fails; later uses of `r` must not add errors of their own.
    auto k = kinds_of("    FILTER t WHERE x > 1 INTO q\n    SELECT q COLUMNS a INTO r");
    EXPECT_EQ(k, only(K::UnknownColumn));
}

TEST(Validator, ExpressionTypes) {
    Schema s = schema({{"amount", ValueType::Decimal}, {"n", ValueType::Int}, {"s", ValueType::String}});
    TypeScope scope{&s, nullptr};
    EXPECT_EQ(typecheck_expr(*parse_expression("amount * 0.08"), scope), ValueType::Decimal);
    EXPECT_EQ(typecheck_expr(*parse_expression("amount > 1000"), scope), ValueType::Bool);
    EXPECT_EQ(typecheck_expr(*parse_expression("n / 2"), scope), ValueType::Int);
    EXPECT_EQ(typecheck_expr(*parse_expression("n + 1.5"), scope), ValueType::Decimal);
    EXPECT_EQ(typecheck_expr(*parse_expression("NULL"), scope), std::nullopt);
    EXPECT_EQ(typecheck_expr(*parse_expression("SUBSTRING(s, 1, 3)"), scope), ValueType::String);
    EXPECT_EQ(typecheck_expr(*parse_expression("TO_DECIMAL(s)"), scope), ValueType::Decimal);
    EXPECT_EQ(typecheck_expr(*parse_expression("YEAR(DATE \"2024-01-01\")"), scope), ValueType::Int);
    try {
        typecheck_expr(*parse_expression("\"a\" + 1"), scope);
        FAIL();
    } catch (const TypeCheckError& e) {
        EXPECT_EQ(e.error().kind, K::TypeMismatch);
        EXPECT_NE(e.error().message.find("STRING"), std::string::npos);
        EXPECT_NE(e.error().message.find("INT"), std::string::npos);
    }
    EXPECT_THROW(typecheck_expr(*parse_expression("s > 1"), scope), TypeCheckError);
    EXPECT_THROW(typecheck_expr(*parse_expression("NOT n"), scope), TypeCheckError);
    EXPECT_THROW(typecheck_expr(*parse_expression("UPPER(s, s)"), scope), TypeCheckError);
}

TEST(Validator, WhereMustBeBool) {
    EXPECT_EQ(kinds_of("    FILTER t WHERE a INTO r"), only(K::TypeMismatch));
    EXPECT_TRUE(kinds_of("    FILTER t WHERE NULL INTO r").empty());
}

TEST(Validator, InferenceRules) {
    SchemaLookup datasets = {{"t", schema({{"a", ValueType::Int}, {"s", ValueType::String}})},
                             {"u", schema({{"k", ValueType::Decimal}, {"v", ValueType::Bool}})}};
    auto infer = [&](const std::string& stmt) {
        Pipeline p = parse(program("TABLE[a: INT, s: STRING]", "    " + stmt));
        return infer_statement_schema(p.steps[0].body[0], datasets).to_string();
    };
    EXPECT_EQ(infer("SELECT t COLUMNS s, a INTO r"), "TABLE[s: STRING, a: INT]");
    EXPECT_EQ(infer("RENAME t COLUMN a TO b INTO r"), "TABLE[b: INT, s: STRING]");
    EXPECT_EQ(infer("DROP t COLUMNS a INTO r"), "TABLE[s: STRING]");
    EXPECT_EQ(infer("ADD_COLUMN t WITH c => 1.5 INTO r"), "TABLE[a: INT, s: STRING, c: DECIMAL]");
    EXPECT_EQ(infer("AGGREGATE t GROUP_BY s COMPUTE AVG(a) AS m, MIN(s) AS lo, COUNT() AS n INTO r"),
              "TABLE[s: STRING, m: DECIMAL, lo: STRING, n: INT]");
    EXPECT_EQ(infer("JOIN t WITH u ON a == k INTO r"), "TABLE[a: INT, s: STRING, v: BOOL]");
    EXPECT_EQ(infer("LEFT_JOIN t WITH u ON a == k INTO r"), "TABLE[a: INT, s: STRING, v: BOOL]");
    EXPECT_EQ(infer("SLICE t FROM 1 TO 2 INTO r"), "TABLE[a: INT, s: STRING]");
    EXPECT_EQ(infer("READ \"x.csv\" AS CSV TABLE[q: DATE] INTO r"), "TABLE[q: DATE]");
}

TEST(Validator, SchemaErrors) {
    EXPECT_EQ(validation_kinds(program("TABLE[a: INT]", "    DROP t COLUMNS a INTO r")),
              only(K::SchemaMismatch));
    std::string union_src =
        "PIPELINE p:\n  INPUT t: TABLE[a: INT]\n  INPUT u: TABLE[a: STRING]\n  STEP s:\n    UNION t WITH u INTO r\n  OUTPUT r\n";
    EXPECT_EQ(validation_kinds(union_src), only(K::SchemaMismatch));
    EXPECT_EQ(kinds_of("    MAP t WITH a => a + 1 INTO r"), only(K::SchemaMismatch));
    EXPECT_EQ(kinds_of("    RENAME t COLUMN a TO s INTO r"), only(K::SchemaMismatch));
    EXPECT_EQ(kinds_of("    JOIN t WITH t ON a == a INTO r"), only(K::SchemaMismatch));
    EXPECT_EQ(kinds_of("    JOIN t WITH t ON a == s INTO r"), only(K::TypeMismatch));
    EXPECT_EQ(kinds_of("    AGGREGATE t COMPUTE SUM(s) AS x INTO r"), only(K::TypeMismatch));
    EXPECT_EQ(kinds_of("    AGGREGATE t GROUP_BY a COMPUTE COUNT() AS a INTO r"), only(K::SchemaMismatch));
}

TEST(Validator, InvalidArguments) {
    EXPECT_EQ(kinds_of("    LIMIT t -1 INTO r"), only(K::InvalidArgument));
    EXPECT_EQ(kinds_of("    SLICE t FROM -2 TO 3 INTO r"), only(K::InvalidArgument));
    EXPECT_EQ(kinds_of("    MAP t WITH b => FOO(a) INTO r"), only(K::InvalidArgument));
    EXPECT_EQ(kinds_of("    MAP t WITH b => NULL INTO r"), only(K::InvalidArgument));
    EXPECT_TRUE(kinds_of("    LIMIT t 2 - 5 INTO r").empty());
}

TEST(Validator, IfBindingsNeedBothBranches) {
    std::string both = "    IF TRUE THEN\n      DISTINCT t INTO r\n    ELSE\n      FILTER t WHERE a > 0 INTO r\n    END_IF";
    EXPECT_TRUE(kinds_of(both).empty());
    EXPECT_EQ(kinds_of("    IF TRUE THEN\n      DISTINCT t INTO r\n    END_IF"), only(K::OutputUndefined));
    std::string mismatched =
        "    IF TRUE THEN\n      DISTINCT t INTO r\n    ELSE\n      SELECT t COLUMNS a INTO r\n    END_IF";
    EXPECT_EQ(kinds_of(mismatched), only(K::SchemaMismatch));
}

TEST(Validator, LoopBindingsStayInside) {
    EXPECT_EQ(kinds_of("    FOR_EACH row IN t DO\n      FILTER t WHERE a == row.a INTO one\n    END_FOR\n    DISTINCT one INTO r"),
              only(K::UnknownDataset));
    EXPECT_EQ(kinds_of("    WHILE FALSE DO\n      DISTINCT t INTO w\n    END_WHILE\n    DISTINCT w INTO r"),
              only(K::UnknownDataset));
    EXPECT_EQ(kinds_of("    FOR_EACH row IN t DO\n      FILTER t WHERE a == row.zz INTO one\n    END_FOR\n    DISTINCT t INTO r"),
              only(K::UnknownColumn));
    EXPECT_EQ(kinds_of("    FOR_EACH t IN t DO\n      DISTINCT t INTO one\n    END_FOR\n    DISTINCT t INTO r"),
              only(K::DuplicateBinding));
}

TEST(Validator, TryExportsNamesBoundInBothBlocks) {
    EXPECT_TRUE(kinds_of("    TRY\n      DISTINCT t INTO r\n    ON_ERROR\n      DISTINCT t INTO r\n    END_TRY").empty());
    EXPECT_EQ(kinds_of("    TRY\n      DISTINCT t INTO x\n    ON_ERROR\n      DISTINCT t INTO y\n    END_TRY\n    DISTINCT x INTO r"),
              only(K::UnknownDataset));
}

TEST(Validator, ColumnsOutsideRowContext) {
    EXPECT_EQ(kinds_of("    IF a > 1 THEN\n      DISTINCT t INTO r\n    ELSE\n      DISTINCT t INTO r\n    END_IF"),
              only(K::UnknownColumn));
}

TEST(Validator, DiagnosticsJson) {
    auto errors = validate(parse(program(kTable, "    FILTER t WHERE zz > 1 INTO r"))).errors;
    auto j = diagnostics_to_json(errors);
    ASSERT_EQ(j.size(), 1u);
    EXPECT_EQ(j[0]["kind"], "UnknownColumn");
    EXPECT_EQ(j[0]["line"], 4);
    EXPECT_EQ(j[0]["column"], 20);
}

TEST(Validator, BranchExports) {
    Pipeline p = parse(program(kTable, "    IF TRUE THEN\n      DISTINCT t INTO r\n      DISTINCT t INTO x\n    ELSE\n      DISTINCT t INTO r\n    END_IF"));
    const auto& s = std::get<IfStmt>(p.steps[0].body[0].node);
    EXPECT_EQ(branch_exports(s.then_body, &*s.else_body), (std::set<std::string>{"r"}));
    EXPECT_TRUE(branch_exports(s.then_body, nullptr).empty());
    EXPECT_EQ(block_bindings(s.then_body), (std::set<std::string>{"r", "x"}));
}
