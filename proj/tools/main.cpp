#include "disccore/cli.hpp"

int main(int argc, char** argv) { return disccore::cli::run(argc, argv); }
