#include "divhjb/config.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <set>
#include <sstream>

namespace divhjb {

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

long long parse_integer(const std::string& key, const std::string& text) {
    errno = 0;
    char* end = nullptr;
    const long long value = std::strtoll(text.c_str(), &end, 10);
    if (text.empty() || errno != 0 || end != text.c_str() + text.size())
        throw ValidationError("config key '" + key + "': expected an integer, got '" + text + "'");
    return value;
}

std::string exact(double value) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty())
            out.push_back(item);
    }
    return out;
}

const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys = {
        "mu",        "lambda",  "xi",        "k",           "beta",  "utility",    "alpha",
        "b",         "x_max",   "output_step", "b_start",   "d_start", "epsilon",  "max_iters",
        "refine_factor", "n_fit", "x_fit_max", "convention", "strategy", "x0",      "n_paths",
        "seed",      "x"};
    return keys;
}

} // namespace

double parse_double(const std::string& key, const std::string& text) {
    errno = 0;
    char* end = nullptr;
    const double value = std::strtod(text.c_str(), &end);
    if (text.empty() || errno == ERANGE || end != text.c_str() + text.size() || !std::isfinite(value))
        throw ValidationError("config key '" + key + "': expected a number, got '" + text + "'");
    return value;
}

KeyValues parse_key_values(std::string_view text) {
    KeyValues values;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto eol = text.find('\n', pos);
        std::string_view line = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        const std::string content = trim(line);
        if (content.empty())
            continue;
        const auto eq = content.find('=');
        if (eq == std::string::npos)
            throw ValidationError("config line " + std::to_string(line_no) + ": expected 'key = value'");
        const std::string key = trim(std::string_view(content).substr(0, eq));
        const std::string value = trim(std::string_view(content).substr(eq + 1));
        if (key.empty())
            throw ValidationError("config line " + std::to_string(line_no) + ": empty key");
        if (!values.emplace(key, value).second)
            throw ValidationError("config line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    }
    return values;
}

RunConfig config_from_key_values(const KeyValues& values) {
    RunConfig cfg;
    for (const auto& [key, value] : values) {
        if (!known_keys().count(key))
            throw ValidationError("unknown config key '" + key + "'");
        auto number = [&]() { return parse_double(key, value); };
        auto count = [&]() {
            const long long n = parse_integer(key, value);
            if (n < 0)
                throw ValidationError("config key '" + key + "' must be non-negative");
            return n;
        };

        if (key == "mu") cfg.mu = number();
        else if (key == "lambda") cfg.lambda = number();
        else if (key == "xi") cfg.xi = number();
        else if (key == "beta") cfg.beta = number();
        else if (key == "k") cfg.k = static_cast<int>(parse_integer(key, value));
        else if (key == "alpha") cfg.alpha = number();
        else if (key == "utility") {
            if (value == "power") cfg.utility = UtilityKind::Power;
            else if (value == "log") cfg.utility = UtilityKind::Logarithmic;
            else throw ValidationError("utility must be 'power' or 'log'");
        }
        else if (key == "b") cfg.solve.b = number();
        else if (key == "x_max") cfg.solve.x_max = number();
        else if (key == "output_step") cfg.solve.output_step = number();
        else if (key == "b_start") cfg.shoot.b_start = number();
        else if (key == "d_start") cfg.shoot.d_start = number();
        else if (key == "epsilon") cfg.shoot.epsilon = number();
        else if (key == "max_iters") cfg.shoot.max_iters = static_cast<std::size_t>(count());
        else if (key == "refine_factor") cfg.shoot.refine_factor = number();
        else if (key == "n_fit") cfg.shoot.n_fit = static_cast<int>(count());
        else if (key == "x_fit_max") cfg.shoot.x_fit_max = number();
        else if (key == "convention") {
            if (value == "payment") cfg.shoot.convention = DiscountConvention::AtPayment;
            else if (value == "literal") cfg.shoot.convention = DiscountConvention::PaperLiteral;
            else throw ValidationError("convention must be 'payment' or 'literal'");
        }
        else if (key == "strategy") cfg.simulate.strategy = value;
        else if (key == "x0") cfg.simulate.x0 = number();
        else if (key == "n_paths") cfg.simulate.n_paths = static_cast<std::size_t>(count());
        else if (key == "seed") cfg.simulate.seed = static_cast<std::uint64_t>(count());
        else if (key == "x") {
            cfg.x = split_list(value);
            for (const auto& item : cfg.x)
                parse_double(key, item);
        }
    }
    return cfg;
}

KeyValues to_key_values(const RunConfig& cfg) {
    KeyValues kv;
    if (cfg.mu) kv["mu"] = exact(*cfg.mu);
    if (cfg.lambda) kv["lambda"] = exact(*cfg.lambda);
    if (cfg.xi) kv["xi"] = exact(*cfg.xi);
    if (cfg.beta) kv["beta"] = exact(*cfg.beta);
    kv["k"] = std::to_string(cfg.k);
    if (cfg.utility) kv["utility"] = *cfg.utility == UtilityKind::Power ? "power" : "log";
    if (cfg.alpha) kv["alpha"] = exact(*cfg.alpha);
    if (cfg.solve.b) kv["b"] = exact(*cfg.solve.b);
    kv["x_max"] = exact(cfg.solve.x_max);
    kv["output_step"] = exact(cfg.solve.output_step);
    kv["b_start"] = exact(cfg.shoot.b_start);
    kv["d_start"] = exact(cfg.shoot.d_start);
    kv["epsilon"] = exact(cfg.shoot.epsilon);
    kv["max_iters"] = std::to_string(cfg.shoot.max_iters);
    kv["refine_factor"] = exact(cfg.shoot.refine_factor);
    kv["n_fit"] = std::to_string(cfg.shoot.n_fit);
    kv["x_fit_max"] = exact(cfg.shoot.x_fit_max);
    kv["convention"] = cfg.shoot.convention == DiscountConvention::AtPayment ? "payment" : "literal";
    kv["strategy"] = cfg.simulate.strategy;
    kv["x0"] = exact(cfg.simulate.x0);
    kv["n_paths"] = std::to_string(cfg.simulate.n_paths);
    kv["seed"] = std::to_string(cfg.simulate.seed);
    if (!cfg.x.empty()) {
        std::string joined;
        for (const auto& item : cfg.x)
            joined += (joined.empty() ? "" : ",") + item;
        kv["x"] = joined;
    }
    return kv;
}

std::string to_config_text(const RunConfig& cfg) {
    std::string text;
    for (const auto& [key, value] : to_key_values(cfg))
        text += key + " = " + value + "\n";
    return text;
}

ModelParams RunConfig::model_params() const {
    std::string missing;
    auto need = [&](const std::optional<double>& v, const char* name) {
        if (!v)
            missing += (missing.empty() ? "" : ", ") + std::string(name);
        return v.value_or(0.0);
    };
    ModelParams p;
    p.mu = need(mu, "mu");
    p.lambda = need(lambda, "lambda");
    p.xi = need(xi, "xi");
    p.beta = need(beta, "beta");
    p.k = k;
    if (!missing.empty())
        throw ValidationError("missing model parameters: " + missing);
    return p;
}

Utility RunConfig::utility_function() const {
    const UtilityKind kind = utility.value_or(alpha ? UtilityKind::Power : UtilityKind::Logarithmic);
    if (kind == UtilityKind::Logarithmic) {
        if (!utility)
            throw ValidationError("no utility given: set utility = power|log (and alpha for power)");
        return Utility::logarithmic();
    }
    if (!alpha)
        throw ValidationError("power utility requires alpha");
    return Utility::power(*alpha);
}

} // namespace divhjb
