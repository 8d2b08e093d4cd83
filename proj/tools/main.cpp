#include "ornithopter/cli.hpp"

int main(int argc, char** argv) { return ornithopter::run_cli(argc, argv); }
