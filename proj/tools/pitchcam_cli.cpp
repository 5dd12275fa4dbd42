#include <iostream>

#include "pitchcam/cli.hpp"

int main(int argc, char** argv) { return pitchcam::run_cli(argc, argv, std::cout, std::cerr); }
