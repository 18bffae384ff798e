#include "evolsym_cli.hpp"

int main(int argc, char** argv) { return evolsym::cli::run(argc, argv); }
