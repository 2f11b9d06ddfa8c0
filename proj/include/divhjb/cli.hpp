#ifndef DIVHJB_CLI_HPP
#define DIVHJB_CLI_HPP

#include <ostream>
#include <string>
#include <vector>

namespace divhjb {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumeric = 3;

/// 9 significant digits, '.' decimal separator; integral values keep a
/// trailing ".0".
std::string format_number(double value);

/// Entry point of the `divhjb` tool. `args` excludes the program name. CSV
/// goes to --out when given, otherwise to `out`; the summary goes to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace divhjb

#endif // DIVHJB_CLI_HPP
