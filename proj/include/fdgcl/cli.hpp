#pragma once

namespace fdgcl::cli {

/// Exit codes: 0 success, 1 usage error, 2 runtime error.
int dispatch(int argc, char** argv);

}  // namespace fdgcl::cli
