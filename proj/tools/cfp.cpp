#include "cfp/cli.hpp"

int main(int argc, char** argv) { return cfp::cli::run(argc, argv); }
