#include "cli.hpp"

int main(int argc, char** argv) { return recordlab::cli::main_entry(argc, argv); }
