#include <iostream>

#include "ptse/cli.hpp"

int main(int argc, char** argv)
{
  return ptse::run_cli(argc, argv, std::cout, std::cerr);
}
