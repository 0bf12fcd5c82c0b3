#include "ionmux/cli.hpp"

int main(int argc, char** argv) { return ionmux::cli_main(argc, argv); }
