#ifndef DIVHJB_CONFIG_HPP
#define DIVHJB_CONFIG_HPP

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "divhjb/model.hpp"
#include "divhjb/shooting.hpp"

namespace divhjb {

/// Ordered key -> raw value map of a flat `key = value` config.
using KeyValues = std::map<std::string, std::string>;

/// Parses `key = value` lines; `#` starts a comment, blank lines are
/// ignored. Malformed lines and duplicate keys are rejected.
KeyValues parse_key_values(std::string_view text);

struct SolveSettings {
    std::optional<double> b;
    double x_max = 10.0;
    double output_step = 0.01;
};

struct ShootSettings {
    double b_start = 1.9;
    double d_start = 0.01;
    double epsilon = 1e-3;
    std::size_t max_iters = 200;
    double refine_factor = 10.0;
    int n_fit = 11;
    double x_fit_max = 10.0;
    DiscountConvention convention = DiscountConvention::AtPayment;
};

struct SimulateSettings {
    std::string strategy = "grid";  ///< constant:<c> | linear:<a1>,<b1> | grid | asymptotic
    double x0 = 5.0;
    std::size_t n_paths = 100'000;
    std::uint64_t seed = 1;
};

struct RunConfig {
    std::optional<double> mu;
    std::optional<double> lambda;
    std::optional<double> xi;
    std::optional<double> beta;
    int k = 1;
    std::optional<UtilityKind> utility;
    std::optional<double> alpha;
    SolveSettings solve;
    ShootSettings shoot;
    SimulateSettings simulate;
    std::vector<std::string> x;  ///< surplus levels, kept as typed

    /// All process parameters; throws ValidationError naming missing keys
    /// and on non-positive values.
    ModelParams model_params() const;
    /// Power if utility = power or only alpha is given.
    Utility utility_function() const;
};

/// Builds a RunConfig; unknown keys and unparsable values raise
/// ValidationError.
RunConfig config_from_key_values(const KeyValues& values);

KeyValues to_key_values(const RunConfig& config);
std::string to_config_text(const RunConfig& config);

/// Strict number parsing used for config values and flags.
double parse_double(const std::string& key, const std::string& text);

} // namespace divhjb

#endif // DIVHJB_CONFIG_HPP
