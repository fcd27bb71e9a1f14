#include "frontlab/cli/app.hpp"

int main(int argc, char** argv) { return frontlab::cli::main_entry(argc, argv); }
