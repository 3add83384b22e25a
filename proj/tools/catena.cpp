#include "catena/cli/commands.hpp"

int main(int argc, char** argv) { return catena::cli::main_entry(argc, argv); }
