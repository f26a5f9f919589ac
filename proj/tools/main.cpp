#include "cli.hpp"

int main(int argc, char** argv) { return gausskraft::cli::run(argc, argv); }
