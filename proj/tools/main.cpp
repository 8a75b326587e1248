#include "cli.hpp"

int main(int argc, char** argv) { return oqsid::cli::main(argc, argv); }
