#include "counterfair/cli.hpp"

int main(int argc, char** argv) { return counterfair::run_cli(argc, argv); }
