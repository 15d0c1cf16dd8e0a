#include "noether2d/scenario.hpp"

int main(int argc, char** argv) { return noether2d::cli_main(argc, argv); }
