#include "quadgait/cli.hpp"

int main(int argc, char** argv) { return quadgait::cli::run(argc, argv); }
