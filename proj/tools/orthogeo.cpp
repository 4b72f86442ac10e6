#include "orthogeo/cli.hpp"

int main(int argc, char** argv) { return orthogeo::cli::run_cli(argc, argv); }
