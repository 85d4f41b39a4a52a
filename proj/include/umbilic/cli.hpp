#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "umbilic/index.hpp"
#include "umbilic/json_io.hpp"

namespace umb {

inline constexpr int kExitPass = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitFailed = 2;

struct VerifyOptions {
    std::uint64_t seed = 1;
    std::size_t convexity_samples = 10000;
    double tol_hausdorff = 1e-7;
    FinderConfig finder;
    IndexConfig index;
};

/// The full pipeline as a JSON report; report["pass"] is true iff every check
/// passed or did not apply.
Json verify_report(const SurfaceSpec& spec, const VerifyOptions& opt = {});

/// `args` excludes the program name. Returns the process exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace umb
