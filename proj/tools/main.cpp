#include "subpix/cli.hpp"

int main(int argc, char** argv) {
    return subpix::cli_main(argc, argv);
}
