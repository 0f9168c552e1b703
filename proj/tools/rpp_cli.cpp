#include "rpp/cli.hpp"

int main(int argc, char** argv) { return rpp::cli::main(argc, argv); }
