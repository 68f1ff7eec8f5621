#include "cli.hpp"

int main(int argc, char** argv) { return wete::cli_main(argc, argv); }
