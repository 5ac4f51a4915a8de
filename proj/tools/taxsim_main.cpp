#include "taxsim/cli.hpp"

int main(int argc, char** argv) {
    return taxsim::run_cli(argc, argv);
}
