#pragma once

#include "sigmalab/blowup_diag.hpp"
#include "sigmalab/moduli.hpp"
#include "sigmalab/params.hpp"
#include "sigmalab/solver.hpp"

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace sigmalab {

struct ConfigKey {
    std::string name;
    std::string default_value;
    std::string help;
};

/// Every accepted key with its default, in display order.
const std::vector<ConfigKey>& config_keys();

/// Flat key=value experiment configuration with all defaults resolved.
class ExperimentConfig {
public:
    ExperimentConfig(); ///< all defaults

    /// Sets one key; unknown keys throw ConfigParse. `where` prefixes the message (e.g. "run.cfg:3").
    void set(const std::string& key, const std::string& value, const std::string& where = "override");
    /// "key=value"
    void apply_override(std::string_view assignment);

    [[nodiscard]] const std::string& get(const std::string& key) const;
    [[nodiscard]] double get_double(const std::string& key) const;
    [[nodiscard]] int get_int(const std::string& key) const;
    [[nodiscard]] bool get_bool(const std::string& key) const;
    [[nodiscard]] std::vector<double> get_list(const std::string& key) const;

    [[nodiscard]] EquationParams params() const;
    [[nodiscard]] Modulus modulus() const;
    [[nodiscard]] SolverConfig solver() const;
    [[nodiscard]] DataProfile profile() const;

    /// Throws ConfigInvalid naming the failed constraint. Runs the params and modulus checks.
    void validate() const;

    /// "# key=value" lines in key order.
    [[nodiscard]] std::string comment_header() const;
    [[nodiscard]] const std::map<std::string, std::string>& values() const noexcept { return values_; }

private:
    std::map<std::string, std::string> values_;
};

/// Parses "key = value" lines; '#' starts a comment. Errors carry "source:line".
ExperimentConfig parse_config_text(std::string_view text, const std::string& source = "<inline>");
ExperimentConfig parse_config_file(const std::string& path);

} // namespace sigmalab
