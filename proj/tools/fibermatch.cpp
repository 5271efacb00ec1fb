#include <iostream>

#include "fibermatch/app/commands.hpp"

int main(int argc, char** argv) { return fibermatch::app::run_cli(argc, argv, std::cout, std::cerr); }
