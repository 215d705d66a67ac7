#include "muxsim/cli.hpp"

int main(int argc, char** argv) { return muxsim::cli_main(argc, argv); }
