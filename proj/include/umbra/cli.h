#ifndef UMBRA_CLI_H_
#define UMBRA_CLI_H_

#include <ostream>
#include <string>
#include <vector>

#include "umbra/image.h"
#include "umbra/params.h"

namespace umbra {

// Stable exit statuses for scripts.
inline constexpr int kExitOk = 0;
inline constexpr int kExitIo = 1;
inline constexpr int kExitInvalid = 2;

// Target of `learn --selftest`; every gene sits away from its bound.
inline constexpr ParamVector kSelftestTarget{20, 7, 0.6, 0.3, 5.0, 0.75};

// Runs `umbra <command> [flags]`. `args` excludes the program name.
// Normal output goes to `out`, diagnostics to `err`.
int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err);

// Intermediate dump paths for an output path: "<dir>/<stem>.<kind>.png".
std::string IntermediatePath(const std::string& out_path, const std::string& kind);

}  // namespace umbra

#endif  // UMBRA_CLI_H_
