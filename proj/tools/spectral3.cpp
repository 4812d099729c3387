#include <spectral3/cli.hpp>

int main(int argc, char** argv) { return spectral3::cli::run(argc, argv); }
