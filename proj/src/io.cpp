#include "syk/io.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

#include "syk/errors.hpp"

namespace syk {

std::string fmt_g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt_hex(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%a", v);
    return buf;
}

double parse_double(const std::string& token) {
    if (token.empty()) fail(errc::config_error, "empty numeric token");
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(token.c_str(), &end);
    if (end != token.c_str() + token.size() || errno == ERANGE)
        fail(errc::config_error, "bad numeric token '" + token + "'");
    return v;
}

std::int64_t parse_int(const std::string& token) {
    if (token.empty()) fail(errc::config_error, "empty integer token");
    errno = 0;
    char* end = nullptr;
    const long long v = std::strtoll(token.c_str(), &end, 10);
    if (end != token.c_str() + token.size() || errno == ERANGE)
        fail(errc::config_error, "bad integer token '" + token + "'");
    return v;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(errc::io_error, "cannot open '" + path + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) fail(errc::io_error, "read failed on '" + path + "'");
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(errc::io_error, "cannot open '" + path + "' for writing");
    out << content;
    out.flush();
    if (!out) fail(errc::io_error, "write failed on '" + path + "'");
}

std::string json_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size() + 2);
    for (unsigned char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default:
                if (c < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x", c);
                    out += buf;
                } else {
                    out += static_cast<char>(c);
                }
        }
    }
    return out;
}

void JsonWriter::put(const std::string& key, const std::string& value) {
    fields_.emplace_back(key, "\"" + json_escape(value) + "\"");
}

void JsonWriter::put_raw(const std::string& key, const std::string& rendered) {
    fields_.emplace_back(key, rendered);
}

void JsonWriter::put_num(const std::string& key, double value) {
    fields_.emplace_back(key, fmt_g17(value));
}

void JsonWriter::put_int(const std::string& key, std::int64_t value) {
    fields_.emplace_back(key, std::to_string(value));
}

void JsonWriter::put_uint(const std::string& key, std::uint64_t value) {
    fields_.emplace_back(key, std::to_string(value));
}

void JsonWriter::put_bool(const std::string& key, bool value) {
    fields_.emplace_back(key, value ? "true" : "false");
}

void JsonWriter::put_num_array(const std::string& key, const std::vector<double>& values) {
    std::string arr = "[";
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) arr += ",";
        arr += fmt_g17(values[i]);
    }
    arr += "]";
    fields_.emplace_back(key, arr);
}

std::string JsonWriter::render() const {
    std::string out = "{\n";
    for (std::size_t i = 0; i < fields_.size(); ++i) {
        out += "  \"" + json_escape(fields_[i].first) + "\": " + fields_[i].second;
        if (i + 1 < fields_.size()) out += ",";
        out += "\n";
    }
    out += "}\n";
    return out;
}

} // namespace syk
