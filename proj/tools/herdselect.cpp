#include "herdselect/cli.hpp"

int main(int argc, char** argv) { return herdselect::run_cli(argc, argv); }
