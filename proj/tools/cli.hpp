#pragma once

#include <ostream>

namespace randsum::cli {

/// Runs one `randsum` invocation. Returns the process exit status:
/// 0 success, 1 domain error (JSON error object on err), 2 usage error.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace randsum::cli
