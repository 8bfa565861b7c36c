#include "spanforest/cli.hpp"

int main(int argc, char** argv) { return spanforest::run_cli(argc, argv); }
