#include "commands.hpp"

int main(int argc, char** argv) {
    return n2v::cli::run_cli(argc, argv);
}
