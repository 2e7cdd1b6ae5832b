#include "gaugekit/cli.hpp"

int main(int argc, char** argv) { return gaugekit::cli::run(argc, argv); }
