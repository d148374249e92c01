#include "kdvk/cli.hpp"

int main(int argc, char** argv) { return kdvk::cli::run(argc, argv); }
