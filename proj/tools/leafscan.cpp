#include "leafscan/cli.hpp"

int main(int argc, char **argv) { return leafscan::cli::run(argc, argv); }
