#include "srlab/cli.hpp"

int main(int argc, char** argv) { return srlab::cli::main(argc, argv); }
