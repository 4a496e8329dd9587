#include "glpd/cli.hpp"

int main(int argc, char** argv) { return glpd::cli::run(argc, argv); }
