#include "camcond/cli.hpp"

int main(int argc, char** argv) { return camcond::cli::run(argc, argv); }
