#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "gema/random.hpp"

namespace gema::cli {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

enum class Format { Json, Text };

struct RunConfig {
    std::uint64_t seed = kDefaultSeed;
    std::map<std::string, double> tolerances;  // overrides, by check name
    std::optional<std::string> out;            // stdout when empty
    Format format = Format::Json;
    std::optional<std::size_t> samples;        // command default when empty
    std::optional<double> level;               // syz slice level, 1/d when empty
};

struct Check {
    std::string name;
    double value = 0.0;
    double tolerance = 0.0;
    bool exact = false;  // boolean check: value is 1 for success, tolerance unused
    bool passed = false;
};

/*
 * Result of one command. input echoes what was checked, result holds the
 * measured quantities in a fixed key order, and error is set when the run
 * was aborted by a library error (exit code 2).
 */
struct Report {
    std::string command;
    Json input = Json::object();
    Json result = Json::object();
    std::vector<Check> checks;
    std::optional<std::pair<std::string, std::string>> error;  // kind, message

    bool passed() const;
    int exit_code() const;
};

/// Tolerance names and defaults for a subcommand, in report order.
const std::vector<std::pair<std::string, double>>& default_tolerances(const std::string& command);

Report cmd_gema_check(const std::string& potential, std::size_t dim, const RunConfig& cfg);
Report cmd_expfam_check(const std::optional<std::string>& family_path, std::size_t dim, const RunConfig& cfg);
Report cmd_bhk(const std::string& polynomial, const RunConfig& cfg);
Report cmd_syz(const std::string& polynomial, const RunConfig& cfg);
Report cmd_kvn(const std::string& wavefunction_path, const std::string& params_path,
               const std::optional<std::string>& family_path, const RunConfig& cfg);
Report cmd_cone_check(std::size_t n, bool complex, const RunConfig& cfg);

/// {schema_version, command, config, input, result, checks, passed, failures[, error]}.
Json to_json(const Report& report, const RunConfig& cfg);

/// The document written for --format json (two-space indent, trailing newline) or text.
std::string render(const Report& report, const RunConfig& cfg);

/*
 * Full command-line entry point. Exit codes: 0 all checks passed, 1 some
 * check failed, 2 usage or input error.
 */
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace gema::cli
