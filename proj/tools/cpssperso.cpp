#include "cpssperso/cli.hpp"

int main(int argc, char** argv) { return cpssperso::cli::run(argc, argv); }
