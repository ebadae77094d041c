#pragma once

#include <anka/table.hpp>

#include <json.hpp>

#include <chrono>
#include <stdexcept>
#include <string>
#include <string_view>

namespace anka {

/// Malformed serialized data. The message names the row (or line) and field.
class DataFormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// File or network failure reported by an adapter.
class IoFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// ─── JSON ────────────────────────────────────────────────────────────────────

/// Reads an array of flat objects. Columns follow `schema`; missing keys are
/// null; unknown keys are ignored. DECIMAL accepts a JSON number (read from
/// its exact source text) or a numeric string. Throws DataFormatError.
auto table_from_json(std::string_view bytes, const Schema& schema) -> Table;

/// Same, from an already parsed document (used for inline suite tables).
/// Non-integral numbers are recovered from their shortest round-trip text.
auto table_from_json_value(const nlohmann::ordered_json& rows, const Schema& schema) -> Table;

/// Array of objects with keys in schema order. DECIMAL cells are written as
/// strings so that no precision is lost.
auto table_to_json_value(const Table& table) -> nlohmann::ordered_json;
auto table_to_json(const Table& table) -> std::string;

// ─── CSV (RFC 4180) ──────────────────────────────────────────────────────────

/// Comma-delimited, double-quote quoting, CRLF or LF line endings. The first
/// record is a header that must list the schema's field names in order. An
/// unquoted empty field is null; a quoted empty field (`""`) is the empty
/// string. Throws DataFormatError citing the 1-based line number.
auto table_from_csv(std::string_view bytes, const Schema& schema) -> Table;

/// LF line endings; empty strings are written as `""`, nulls as nothing.
auto table_to_csv(const Table& table) -> std::string;

// ─── adapters ────────────────────────────────────────────────────────────────

struct HttpResponse {
    int status = 0;
    std::string body;
};

/// Side-effecting capabilities used by READ, WRITE, FETCH and POST.
/// Implementations throw IoFailure on failure.
class IoAdapter {
public:
    virtual ~IoAdapter() = default;

    virtual auto read_file(const std::string& path) -> std::string = 0;
    virtual void write_file(const std::string& path, std::string_view bytes) = 0;
    virtual auto http_get(const std::string& url) -> HttpResponse = 0;
    virtual auto http_post(const std::string& url, std::string_view body,
                           const std::string& content_type) -> HttpResponse = 0;
};

/// Local filesystem plus HTTP/1.1 (cpp-httplib).
class SystemIoAdapter final : public IoAdapter {
public:
    explicit SystemIoAdapter(std::chrono::milliseconds http_timeout = std::chrono::seconds(10))
        : http_timeout_(http_timeout) {}

    auto read_file(const std::string& path) -> std::string override;
    void write_file(const std::string& path, std::string_view bytes) override;
    auto http_get(const std::string& url) -> HttpResponse override;
    auto http_post(const std::string& url, std::string_view body,
                   const std::string& content_type) -> HttpResponse override;

private:
    std::chrono::milliseconds http_timeout_;
};

/// Refuses every operation without touching the system.
class DenyAllIoAdapter final : public IoAdapter {
public:
    auto read_file(const std::string& path) -> std::string override;
    void write_file(const std::string& path, std::string_view bytes) override;
    auto http_get(const std::string& url) -> HttpResponse override;
    auto http_post(const std::string& url, std::string_view body,
                   const std::string& content_type) -> HttpResponse override;
};

struct ParsedUrl {
    std::string scheme;  // "http" or "https"
    std::string host;
    int port = 0;
    std::string path;  // includes query; "/" when absent
};

/// Absolute http/https URLs only. Throws IoFailure otherwise.
auto parse_url(std::string_view url) -> ParsedUrl;

}  // namespace anka
