#include "commands.hpp"

int main(int argc, char** argv) { return hrcp::cli::main_entry(argc, argv); }
