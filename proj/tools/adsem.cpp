#include "adsem/cli.hpp"

#include <iostream>

int main( int argc, char** argv )
{
    std::vector< std::string > args( argv + 1, argv + argc );
    return adsem::run_cli( args, std::cout, std::cerr );
}
