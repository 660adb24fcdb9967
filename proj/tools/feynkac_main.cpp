#include "fkac/cli.hpp"

int main(int argc, char** argv) { return fkac::run_cli(argc, argv); }
