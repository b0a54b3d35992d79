#include "commands.hpp"

int main(int argc, char** argv) { return danc::cli::run_cli(argc, argv); }
