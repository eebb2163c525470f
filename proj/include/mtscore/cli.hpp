#ifndef MTSCORE_CLI_HPP_
#define MTSCORE_CLI_HPP_

namespace mtscore {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDataError = 1;
inline constexpr int kExitUsage = 2;

// Entry point of the mtscore command-line tool. Returns the process exit
// code: 0 on success, 1 on a data validation error, 2 on a usage error.
int run_cli(int argc, const char* const* argv);

}  // namespace mtscore

#endif  // MTSCORE_CLI_HPP_
