#include "generators.hpp"
#include "helpers.hpp"

#include <httplib.h>

#include <gtest/gtest.h>

#include <filesystem>
#include <thread>

using namespace anka;
using namespace anka::unit;

namespace {

const Schema kA = schema({{"a", ValueType::Int}});

auto error_text(const std::function<void()>& f) -> std::string {
    try {
        f();
    } catch (const DataFormatError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST(Json, ReadsArrayOfObjects) {
    Table t = table_from_json(R"([{"a":1},{"a":2}])", kA);
    EXPECT_EQ(t.row_count(), 2u);
    EXPECT_EQ(t.at(1, 0), Value(2));
    EXPECT_EQ(table_from_json("[]", kA).row_count(), 0u);
}

TEST(Json, ConversionErrorsNameRowAndField) {
    std::string msg = error_text([] { table_from_json(R"([{"a":"x"}])", kA); });
    EXPECT_NE(msg.find("row 0"), std::string::npos) << msg;
    EXPECT_NE(msg.find("'a'"), std::string::npos) << msg;
    EXPECT_FALSE(error_text([] { table_from_json(R"([{"a":1.5}])", kA); }).empty());
    EXPECT_FALSE(error_text([] { table_from_json(R"({"a":1})", kA); }).empty());
    EXPECT_FALSE(error_text([] { table_from_json(R"([{"a":[1]}])", kA); }).empty());
    EXPECT_FALSE(error_text([] { table_from_json("[{", kA); }).empty());
}

TEST(Json, MissingKeysAreNullAndExtraKeysIgnored) {
    Schema s = schema({{"a", ValueType::Int}, {"b", ValueType::String}});
    Table t = table_from_json(R"([{"b":"x","zz":3},{"a":null}])", s);
    EXPECT_TRUE(t.at(0, 0).is_null());
    EXPECT_EQ(t.at(0, 1), Value("x"));
    EXPECT_TRUE(t.at(1, 1).is_null());
}

TEST(Json, DecimalsAreExact) {
    Schema s = schema({{"d", ValueType::Decimal}});
    Table t = table_from_json(R"([{"d":0.1},{"d":"12.340"},{"d":1.5e2},{"d":12345678901234567.89}])", s);
    EXPECT_EQ(t.at(0, 0).to_string(), "0.1");
    EXPECT_EQ(t.at(1, 0).to_string(), "12.340");
    EXPECT_EQ(t.at(2, 0), dec("150"));
    EXPECT_EQ(t.at(3, 0).to_string(), "12345678901234567.89");
    EXPECT_EQ(table_to_json(t), R"([{"d":"0.1"},{"d":"12.340"},{"d":"150"},{"d":"12345678901234567.89"}])");
}

TEST(Json, DatesAndBools) {
    Schema s = schema({{"d", ValueType::Date}, {"t", ValueType::DateTime}, {"b", ValueType::Bool}});
    Table t = table_from_json(R"([{"d":"2024-01-31","t":"2024-01-31T08:00:00","b":true}])", s);
    EXPECT_EQ(table_to_json(t), R"([{"d":"2024-01-31","t":"2024-01-31T08:00:00","b":true}])");
    EXPECT_FALSE(error_text([&] { table_from_json(R"([{"d":"2024-02-30"}])", s); }).empty());
}

TEST(Json, RoundTripOnRandomTables) {
    gen::Rng rng(21);
    for (int i = 0; i < 200; ++i) {
        Schema s = gen::random_schema(rng, 1, 6, "c");
        Table t = gen::random_table(rng, s, 15, gen::Domain::Wide, 0.2);
        Table back = table_from_json(table_to_json(t), s);
        ASSERT_TRUE(table_equal(t, back)) << format_table(t);
        ASSERT_EQ(format_table(t), format_table(back));
    }
}

TEST(Csv, ReadsRows) {
    Table t = table_from_csv("a\n1\n2\n", kA);
    EXPECT_EQ(t.row_count(), 2u);
    EXPECT_EQ(table_from_csv("a\r\n1\r\n2", kA).row_count(), 2u);
    EXPECT_EQ(table_from_csv("a\n", kA).row_count(), 0u);
}

TEST(Csv, QuotedFieldsRoundTrip) {
    Schema s = schema({{"a", ValueType::Int}, {"s", ValueType::String}});
    Table t = table(s, {{Value(1), Value("x,y")}, {Value(2), Value("say \"hi\"\nbye")}, {Value(), Value("")},
                        {Value(3), Value()}});
    std::string csv = table_to_csv(t);
    EXPECT_EQ(csv, "a,s\n1,\"x,y\"\n2,\"say \"\"hi\"\"\nbye\"\n,\"\"\n3,\n");
    EXPECT_TRUE(table_equal(table_from_csv(csv, s), t));
}

TEST(Csv, ErrorsCiteLines) {
    EXPECT_NE(error_text([] { table_from_csv("b\n1\n", kA); }).find("line 1"), std::string::npos);
    EXPECT_NE(error_text([] { table_from_csv("a\n1\n1,2\n", kA); }).find("line 3"), std::string::npos);
    EXPECT_NE(error_text([] { table_from_csv("a\n1\nx\n", kA); }).find("line 3"), std::string::npos);
    EXPECT_FALSE(error_text([] { table_from_csv("a\n\"open\n", kA); }).empty());
    EXPECT_FALSE(error_text([] { table_from_csv("", kA); }).empty());
}

TEST(Csv, RoundTripOnRandomTables) {
    gen::Rng rng(22);
    for (int i = 0; i < 200; ++i) {
        Schema s = gen::random_schema(rng, 1, 6, "c");
        Table t = gen::random_table(rng, s, 15, gen::Domain::Wide, 0.2);
        std::string csv = table_to_csv(t);
        Table back = table_from_csv(csv, s);
        ASSERT_TRUE(table_equal(t, back)) << csv;
        ASSERT_EQ(format_table(t), format_table(back));
    }
}

TEST(Url, Parsing) {
    ParsedUrl u = parse_url("http://localhost:8080/a/b?x=1");
    EXPECT_EQ(u.scheme, "http");
    EXPECT_EQ(u.host, "localhost");
    EXPECT_EQ(u.port, 8080);
    EXPECT_EQ(u.path, "/a/b?x=1");
    EXPECT_EQ(parse_url("https://example.com").port, 443);
    EXPECT_EQ(parse_url("http://example.com").path, "/");
    EXPECT_THROW(parse_url("ftp://x"), IoFailure);
    EXPECT_THROW(parse_url("/relative"), IoFailure);
    EXPECT_THROW(parse_url("http://:80/"), IoFailure);
}

TEST(Adapters, DenyAllRefusesEverything) {
    DenyAllIoAdapter io;
    EXPECT_THROW(io.read_file("x"), IoFailure);
    EXPECT_THROW(io.write_file("x", "y"), IoFailure);
    EXPECT_THROW(io.http_get("http://localhost/"), IoFailure);
    EXPECT_THROW(io.http_post("http://localhost/", "[]", "application/json"), IoFailure);
}

TEST(Adapters, FilesystemRoundTrip) {
    auto path = std::filesystem::temp_directory_path() / "anka-io-test.json";
    SystemIoAdapter io;
    io.write_file(path.string(), "[1]");
    EXPECT_EQ(io.read_file(path.string()), "[1]");
    std::filesystem::remove(path);
    EXPECT_THROW(io.read_file(path.string()), IoFailure);
}

class HttpTest : public ::testing::Test {
protected:
    void SetUp() override {
        server_.Get("/empty", [](const httplib::Request&, httplib::Response& res) {
            res.set_content("[]", "application/json");
        });
        server_.Get("/rows", [](const httplib::Request&, httplib::Response& res) {
            res.set_content(R"([{"a":7}])", "application/json");
        });
        server_.Get("/fail", [](const httplib::Request&, httplib::Response& res) {
            res.status = 500;
            res.set_content("boom", "text/plain");
        });
        server_.Post("/sink", [this](const httplib::Request& req, httplib::Response& res) {
            std::lock_guard lock(mutex_);
            posted_ = req.body;
            content_type_ = req.get_header_value("Content-Type");
            res.status = 201;
        });
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }

    void TearDown() override {
        server_.stop();
        thread_.join();
    }

    auto url(const std::string& path) const -> std::string {
        return "http://127.0.0.1:" + std::to_string(port_) + path;
    }

    auto run_with_io(const std::string& body) -> Table {
        Pipeline p = parse(program("TABLE[a: INT]", body));
        auto v = validate(p);
        if (!v.ok()) {
            throw std::runtime_error(v.errors.front().message);
        }
        SystemIoAdapter io(std::chrono::seconds(5));
        return run_pipeline(p, {{"t", table(kA, {{Value(1)}, {Value(2)}})}}, io);
    }

    httplib::Server server_;
    std::thread thread_;
    int port_ = 0;
    std::mutex mutex_;
    std::string posted_;
    std::string content_type_;
};

TEST_F(HttpTest, FetchEmptyArray) {
    Table t = run_with_io("    FETCH \"" + url("/empty") + "\" TABLE[a: INT] INTO r");
    EXPECT_EQ(t.row_count(), 0u);
    EXPECT_EQ(t.schema(), kA);
}

TEST_F(HttpTest, FetchRows) {
    Table t = run_with_io("    FETCH \"" + url("/rows") + "\" TABLE[a: INT] INTO r");
    EXPECT_EQ(t.at(0, 0), Value(7));
}

TEST_F(HttpTest, ServerErrorIsHttpError) {
    try {
        run_with_io("    FETCH \"" + url("/fail") + "\" TABLE[a: INT] INTO r");
        FAIL();
    } catch (const RuntimeError& e) {
        EXPECT_EQ(e.kind(), RuntimeErrorKind::HttpError);
        EXPECT_NE(e.message().find("500"), std::string::npos) << e.message();
    }
}

TEST_F(HttpTest, PostSendsJson) {
    run_with_io("    POST t TO \"" + url("/sink") + "\"\n    DISTINCT t INTO r");
    std::lock_guard lock(mutex_);
    EXPECT_EQ(posted_, R"([{"a":1},{"a":2}])");
    EXPECT_EQ(content_type_, "application/json");
}

TEST_F(HttpTest, UnreachableHostIsHttpError) {
    std::string dead = "http://127.0.0.1:1/x";
    try {
        run_with_io("    FETCH \"" + dead + "\" TABLE[a: INT] INTO r");
        FAIL();
    } catch (const RuntimeError& e) {
        EXPECT_EQ(e.kind(), RuntimeErrorKind::HttpError);
    }
}
