#include "ratewatch/io.hpp"

int main(int argc, char** argv) {
    return ratewatch::run_cli(argc, argv);
}
