#include "fdgcl/cli.hpp"

int main(int argc, char** argv) { return fdgcl::cli::dispatch(argc, argv); }
