#include "bcrt/cli.hpp"

int main(int argc, char** argv) { return bcrt::cli::run(argc, argv); }
