#include "sfcsim/cli.hpp"

int main(int argc, char** argv) { return sfcsim::run_cli(argc, argv); }
