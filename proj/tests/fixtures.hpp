#ifndef DIVHJB_TESTS_FIXTURES_HPP
#define DIVHJB_TESTS_FIXTURES_HPP

#include <array>

#include "divhjb/model.hpp"

namespace fixtures {

// Parameter set used for every printed table: alpha=0.5, beta=0.05,
// mu=0.26, xi=0.4, lambda=0.1.
inline divhjb::ModelParams table_params() { return {0.26, 0.1, 0.4, 1, 0.05}; }
inline divhjb::Utility sqrt_utility() { return divhjb::Utility::power(0.5); }

struct TableRow {
    double x, v, vx, c;
};

// b = 2, v(0) = 6.8: divergent branch.
inline constexpr std::array<TableRow, 11> kTable1 = {{
    {0, 6.8000, 2.0000, 0.2500},   {1, 9.4022, 3.1941, 0.0980},    {2, 13.3275, 4.7502, 0.0443},
    {3, 19.1343, 7.0039, 0.0204},  {4, 27.6771, 10.2878, 0.0094},  {5, 40.2103, 15.0801, 0.0044},
    {6, 58.5692, 22.0787, 0.0021}, {7, 85.4378, 32.3029, 0.0010},  {8, 124.7394, 47.2425, 0.0004},
    {9, 182.2094, 69.0750, 0.0002}, {10, 266.2320, 100.9833, 0.0001},
}};

// b = 1.9, v(0) = 6.8021: concave branch.
inline constexpr std::array<TableRow, 11> kTable2 = {{
    {0, 6.8021, 1.9000, 0.2770},  {1, 8.5790, 1.6929, 0.3489},  {2, 10.2022, 1.5575, 0.4122},
    {3, 11.7010, 1.4431, 0.4802}, {4, 13.0940, 1.3454, 0.5525}, {5, 14.3963, 1.2613, 0.6286},
    {6, 15.6203, 1.1884, 0.7081}, {7, 16.7762, 1.1247, 0.7905}, {8, 17.8723, 1.0687, 0.8755},
    {9, 18.9158, 1.0192, 0.9626}, {10, 19.9126, 0.9752, 1.0515},
}};

struct Table3Row {
    double b, a, A, gap;
};

inline constexpr std::array<Table3Row, 8> kTable3 = {{
    {1.9, 6.802105263, 6.794392618, 0.007712645},
    {1.89, 6.803336861, 6.796662198, 0.006674663},
    {1.882, 6.804464186, 6.798652236, 0.005811950},
    {1.8819, 6.804479085, 6.798679195, 0.005799890},
    {1.88186, 6.804485051, 6.798690050, 0.005795001},
    {1.881851, 6.804486392, 6.798692504, 0.005793888},
    {1.8818504, 6.804486482, 6.798692667, 0.005793815},
    {1.88185035, 6.804486489, 6.798692681, 0.005793808},
}};

} // namespace fixtures

#endif // DIVHJB_TESTS_FIXTURES_HPP
