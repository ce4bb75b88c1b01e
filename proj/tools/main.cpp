#include "ptds/cli.hpp"

int main(int argc, char** argv) { return ptds::run_cli(argc, argv); }
