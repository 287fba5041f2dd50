#pragma once

// Run configuration: one INI file per case with [run], [constants], [model],
// [optimizer], [grid], [data] and [loss] sections. Every case declares the
// keys it understands; unknown keys are rejected and missing ones take the
// declared default with a notice.

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace autoint {

struct KeySpec {
    std::string section;
    std::string key;
    std::string default_value;
};

class RunConfig {
public:
    using Section = std::map<std::string, std::string>;

    static RunConfig from_ini_file(const std::string& path);
    static RunConfig from_ini_string(const std::string& text);

    /// "section.key" = value; overrides whatever the file said.
    void set(const std::string& dotted, const std::string& value);
    void set(const std::string& section, const std::string& key, const std::string& value);
    bool has(const std::string& section, const std::string& key) const;

    const std::string& get(const std::string& section, const std::string& key) const;
    double get_double(const std::string& section, const std::string& key) const;
    long get_int(const std::string& section, const std::string& key) const;
    bool get_bool(const std::string& section, const std::string& key) const;
    /// Comma list "a,b,c" or range "lo:hi:n".
    std::vector<double> get_list(const std::string& section, const std::string& key) const;

    /// Reject keys outside `schema`, fill absent ones from it. One notice line
    /// per defaulted key goes to `notices` when given.
    void resolve(const std::vector<KeySpec>& schema, std::ostream* notices);

    /// Sorted "[section]\nkey = value\n" text of every value.
    std::string canonical() const;
    /// FNV-1a 64 of canonical(), hex.
    std::string hash() const;

    const std::map<std::string, Section>& sections() const { return values_; }

private:
    std::map<std::string, Section> values_;
};

/// Cases the runner knows.
const std::vector<std::string>& case_ids();
/// Keys understood by a case; throws ConfigError for an unknown case id.
std::vector<KeySpec> case_schema(const std::string& case_id);

/// Parse "a,b,c" or "lo:hi:n".
std::vector<double> parse_list(const std::string& text);

} // namespace autoint
