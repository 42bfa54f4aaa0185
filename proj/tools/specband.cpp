#include "specband/cli.hpp"

int main(int argc, char** argv) { return specband::cli::main_entry(argc, argv); }
