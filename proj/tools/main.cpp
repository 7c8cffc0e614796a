#include "tractalign/cli.hpp"

int main(int argc, char** argv) { return tractalign::run_cli(argc, argv); }
