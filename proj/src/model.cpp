#include "divhjb/model.hpp"

#include <cmath>
#include <cstdio>

namespace divhjb {

namespace {

void require_positive(double value, const char* name) {
    if (!(value > 0.0) || !std::isfinite(value))
        throw ValidationError(std::string(name) + " must be a finite positive number");
}

} // namespace

std::vector<std::string> validate_params(const ModelParams& params) {
    require_positive(params.mu, "mu");
    require_positive(params.lambda, "lambda");
    require_positive(params.xi, "xi");
    require_positive(params.beta, "beta");
    if (params.k < 1)
        throw ValidationError("k must be a positive integer");

    std::vector<std::string> warnings;
    const double expected_claims = params.lambda * params.mean_claim();
    if (!(params.mu > expected_claims)) {
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "net-profit condition fails: mu = %.9g <= lambda*k/xi = %.9g",
                      params.mu, expected_claims);
        warnings.emplace_back(buf);
    }
    return warnings;
}

} // namespace divhjb
