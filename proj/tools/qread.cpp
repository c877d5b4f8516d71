#include "qread/cli.hpp"

int main(int argc, char** argv) { return qread::cli::run(argc, argv); }
