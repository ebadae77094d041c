#include <anka/io.hpp>

#include <httplib.h>

#include <charconv>
#include <fstream>
#include <sstream>

namespace anka {

auto parse_url(std::string_view url) -> ParsedUrl {
    ParsedUrl out;
    auto sep = url.find("://");
    if (sep == std::string_view::npos) {
        throw IoFailure("not an absolute URL: " + std::string(url));
    }
    out.scheme = std::string(url.substr(0, sep));
    if (out.scheme != "http" && out.scheme != "https") {
        throw IoFailure("unsupported URL scheme '" + out.scheme + "'");
    }
    std::string_view rest = url.substr(sep + 3);
    auto slash = rest.find_first_of("/?");
    std::string_view authority = rest.substr(0, slash);
    out.path = slash == std::string_view::npos ? "/" : std::string(rest.substr(slash));
    if (!out.path.empty() && out.path.front() == '?') {
        out.path.insert(0, "/");
    }
    out.port = out.scheme == "https" ? 443 : 80;
    if (authority.find('@') != std::string_view::npos) {
        throw IoFailure("credentials in URLs are not supported");
    }
    auto colon = authority.rfind(':');
    if (colon != std::string_view::npos && authority.find(']') == std::string_view::npos) {
        std::string_view port = authority.substr(colon + 1);
        int p = 0;
        auto [end, ec] = std::from_chars(port.data(), port.data() + port.size(), p);
        if (ec != std::errc() || end != port.data() + port.size() || p <= 0 || p > 65535) {
            throw IoFailure("invalid port in URL: " + std::string(url));
        }
        out.port = p;
        authority = authority.substr(0, colon);
    }
    if (authority.empty()) {
        throw IoFailure("URL has no host: " + std::string(url));
    }
    out.host = std::string(authority);
    return out;
}

auto SystemIoAdapter::read_file(const std::string& path) -> std::string {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoFailure("cannot open '" + path + "' for reading");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) {
        throw IoFailure("error reading '" + path + "'");
    }
    return buf.str();
}

void SystemIoAdapter::write_file(const std::string& path, std::string_view bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoFailure("cannot open '" + path + "' for writing");
    }
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw IoFailure("error writing '" + path + "'");
    }
}

namespace {

auto client_for(const ParsedUrl& u, std::chrono::milliseconds timeout) -> httplib::Client {
    if (u.scheme == "https") {
        throw IoFailure("https is not supported by this build");
    }
    httplib::Client cli(u.host, u.port);
    cli.set_connection_timeout(timeout);
    cli.set_read_timeout(timeout);
    cli.set_write_timeout(timeout);
    return cli;
}

auto finish(const httplib::Result& res, const std::string& url) -> HttpResponse {
    if (!res) {
        throw IoFailure("request to " + url + " failed: " + httplib::to_string(res.error()));
    }
    return HttpResponse{res->status, res->body};
}

}  // namespace

auto SystemIoAdapter::http_get(const std::string& url) -> HttpResponse {
    ParsedUrl u = parse_url(url);
    auto cli = client_for(u, http_timeout_);
    return finish(cli.Get(u.path), url);
}

auto SystemIoAdapter::http_post(const std::string& url, std::string_view body,
                                const std::string& content_type) -> HttpResponse {
    ParsedUrl u = parse_url(url);
    auto cli = client_for(u, http_timeout_);
    return finish(cli.Post(u.path, std::string(body), content_type), url);
}

auto DenyAllIoAdapter::read_file(const std::string& path) -> std::string {
    throw IoFailure("file access denied: " + path);
}

void DenyAllIoAdapter::write_file(const std::string& path, std::string_view) {
    throw IoFailure("file access denied: " + path);
}

auto DenyAllIoAdapter::http_get(const std::string& url) -> HttpResponse {
    throw IoFailure("network access denied: " + url);
}

auto DenyAllIoAdapter::http_post(const std::string& url, std::string_view, const std::string&)
    -> HttpResponse {
    throw IoFailure("network access denied: " + url);
}

}  // namespace anka
