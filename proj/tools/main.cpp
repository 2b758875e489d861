#include <iostream>

#include "gridwarp/app.hpp"

int main(int argc, char** argv) {
    return gridwarp::run_cli(argc, argv, std::cout, std::cerr);
}
