#include "lbnm/cli.hpp"

int main(int argc, char** argv) { return lbnm::cli::cli_main(argc, argv); }
