#include "tempexit/cli.hpp"

int main(int argc, char** argv) { return tempexit::cli::run(argc, argv); }
