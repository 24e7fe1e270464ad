#include "feyn/cli.hpp"

int main(int argc, char** argv) { return feyn::cli_main(argc, argv); }
