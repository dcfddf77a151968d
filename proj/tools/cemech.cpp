#include <iostream>

#include "cemech/pipeline.hpp"

int main(int argc, char** argv)
{
    return cemech::cli::run(argc, argv, std::cout, std::cerr);
}
