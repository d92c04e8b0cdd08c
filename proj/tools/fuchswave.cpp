#include "fuchswave/cli.hpp"

int main(int argc, char** argv) { return fuchswave::run_cli(argc, argv); }
