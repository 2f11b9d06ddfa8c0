#include "divhjb/parallel.hpp"

#include <cmath>
#include <cstdlib>
#include <string>
#include <thread>

namespace divhjb {

unsigned resolve_threads(unsigned requested) {
    if (requested > 0)
        return requested;
    if (const char* env = std::getenv("DIVHJB_THREADS")) {
        try {
            const long value = std::stol(env);
            if (value > 0)
                return static_cast<unsigned>(value);
        } catch (const std::exception&) {
            // unparsable: fall through to auto
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

void RunningStats::merge(const RunningStats& other) {
    if (other.n == 0)
        return;
    if (n == 0) {
        *this = other;
        return;
    }
    const double total = static_cast<double>(n + other.n);
    const double delta = other.mean - mean;
    mean += delta * static_cast<double>(other.n) / total;
    m2 += other.m2 + delta * delta * static_cast<double>(n) * static_cast<double>(other.n) / total;
    n += other.n;
}

double RunningStats::std_error() const {
    return n > 1 ? std::sqrt(variance() / static_cast<double>(n)) : 0.0;
}

RunningStats merge_pairwise(const std::vector<RunningStats>& blocks) {
    if (blocks.empty())
        return {};
    std::vector<RunningStats> level = blocks;
    while (level.size() > 1) {
        std::vector<RunningStats> next;
        next.reserve((level.size() + 1) / 2);
        for (std::size_t i = 0; i + 1 < level.size(); i += 2) {
            RunningStats merged = level[i];
            merged.merge(level[i + 1]);
            next.push_back(merged);
        }
        if (level.size() % 2 == 1)
            next.push_back(level.back());
        level = std::move(next);
    }
    return level.front();
}

} // namespace divhjb
