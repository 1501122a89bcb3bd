#include "hclab/cli.hpp"

int main(int argc, char** argv) { return hclab::cli_main(argc, argv); }
