#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace bhasha {

// Process exit codes.
enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,      // unknown flags, bad arguments or config
  kExitIo = 2,         // unreadable input or unwritable output
  kExitData = 3,       // malformed or invalid records, sampling shortages
  kExitTransport = 4,  // backend unreachable after retries
  kExitProtocol = 5,   // backend answered outside the protocol
  kExitPartial = 6,    // evaluation left items unscored (without --allow-partial)
};

// args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bhasha
