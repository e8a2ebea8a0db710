#include "aerial/commands.hpp"

int main(int argc, char** argv) { return aerial::run_cli(argc, argv); }
