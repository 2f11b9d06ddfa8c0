#ifndef DIVHJB_PARALLEL_HPP
#define DIVHJB_PARALLEL_HPP

#include <cstddef>
#include <vector>

namespace divhjb {

/// Worker count: an explicit request wins, then DIVHJB_THREADS, then the
/// hardware concurrency. Zero means "auto" at every level.
unsigned resolve_threads(unsigned requested = 0);

/// Mean and second central moment, mergeable in a fixed order.
struct RunningStats {
    std::size_t n = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void push(double x) {
        ++n;
        const double delta = x - mean;
        mean += delta / static_cast<double>(n);
        m2 += delta * (x - mean);
    }

    void merge(const RunningStats& other);

    double variance() const { return n > 1 ? m2 / static_cast<double>(n - 1) : 0.0; }
    double std_error() const;
};

/// Pairwise reduction of per-block statistics in index order, so the result
/// depends only on the block partition.
RunningStats merge_pairwise(const std::vector<RunningStats>& blocks);

/// Calls body(block) for every block in [0, n_blocks) on up to `threads`
/// workers. Blocks are claimed dynamically; results must be stored by index.
/// The first exception thrown by any block is rethrown on the caller.
template <typename Body>
void parallel_blocks(std::size_t n_blocks, unsigned threads, Body&& body);

} // namespace divhjb

#include "divhjb/parallel_impl.hpp"

#endif // DIVHJB_PARALLEL_HPP
