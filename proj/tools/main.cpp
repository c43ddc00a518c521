#include "satoff/cli.hpp"

int main(int argc, char** argv) { return satoff::cli_main(argc, argv); }
