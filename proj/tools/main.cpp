#include "dpoint/cli.hpp"

int main(int argc, char** argv) { return dpoint::run_cli(argc, argv); }
