#include "fnclin/cli.hpp"

int main(int argc, char** argv) { return fnclin::cli::dispatch(argc, argv); }
