#include "kfpls/cli.hpp"

int main(int argc, char** argv) { return kfpls::run_cli(argc, argv); }
