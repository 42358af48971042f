#include "gccf/cli.hpp"

int main(int argc, char** argv) { return gccf::cli::run(argc, argv); }
