#include "widthlab/tools/commands.hpp"

int main(int argc, char** argv) { return widthlab::tools::run_cli(argc, argv); }
