#include "rgsde/cli.hpp"

int main(int argc, char** argv) { return rgsde::run_cli(argc, argv); }
