#include "sisgoal/cli.hpp"

int main(int argc, char** argv) { return sisgoal::cli_main(argc, argv); }
