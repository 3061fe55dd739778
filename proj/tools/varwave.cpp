#include "varwave/cli.hpp"

int main(int argc, char** argv) { return varwave::cli::run(argc, argv); }
