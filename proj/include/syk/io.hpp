#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace syk {

// Round-trippable decimal ("%.17g") and exact hex ("%a") float formatting.
std::string fmt_g17(double v);
std::string fmt_hex(double v);

// strtod that must consume the whole token (accepts both formats above).
double parse_double(const std::string& token);
std::int64_t parse_int(const std::string& token);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

// Minimal flat JSON object writer. Hand-rolled so that every number is
// emitted with the same %.17g policy as the CSV outputs.
class JsonWriter {
  public:
    void put(const std::string& key, const std::string& value);
    void put_raw(const std::string& key, const std::string& rendered);
    void put_num(const std::string& key, double value);
    void put_int(const std::string& key, std::int64_t value);
    void put_uint(const std::string& key, std::uint64_t value);
    void put_bool(const std::string& key, bool value);
    void put_num_array(const std::string& key, const std::vector<double>& values);
    std::string render() const;

  private:
    std::vector<std::pair<std::string, std::string>> fields_;
};

std::string json_escape(const std::string& s);

} // namespace syk
