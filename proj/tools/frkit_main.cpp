#include "cli.hpp"

int main(int argc, char** argv) { return frkit::cli::run(argc, argv); }
