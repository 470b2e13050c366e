#include "laneforge/io.hpp"

int main(int argc, char** argv) { return laneforge::io::cli_main(argc, argv); }
