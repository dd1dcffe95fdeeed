#pragma once

#include <string>
#include <vector>

namespace sojourn::cli {

enum ExitCode : int {
    ok = 0,
    usage_error = 2,
    numerical_failure = 3,
};

/// Entry point of the `sojourn` tool; argv[0] is the program name.
int run(const std::vector<std::string>& args);

/// Frozen CSV column orders.
namespace columns {
inline constexpr const char* eval = "quantity,x,value";
inline constexpr const char* invert = "t,value,est_error,method,order";
inline constexpr const char* simulate =
    "seed,horizon,sojourn,complement_sojourn,first_return,returned,visits_to_zero,max_level";
inline constexpr const char* estimates = "experiment,p,alpha,t,arg,value,stderr,n";
inline constexpr const char* fits =
    "experiment,p,alpha,beta,t_lo,t_hi,slope,slope_stderr,predicted_slope,r_squared";
inline constexpr const char* widths = "t,t_a,sigma,stderr,n";
}  // namespace columns

/// "a,b,c" or "lo:hi:n" (n log-spaced points).
std::vector<double> parse_grid(const std::string& text);

}  // namespace sojourn::cli
