#include "toc/cli.hpp"

int main(int argc, char** argv) { return toc::run_cli(argc, argv); }
