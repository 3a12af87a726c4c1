#include "frnse/cli/app.hpp"

int main(int argc, char** argv) { return frnse::cli::main(argc, argv); }
