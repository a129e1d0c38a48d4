#include "ndefect/cli.hpp"

int main(int argc, char** argv) { return ndefect::cli::run(argc, argv); }
