#include "vlir/cli.hpp"

int main(int argc, char** argv) { return vlir::run_cli(argc, argv); }
