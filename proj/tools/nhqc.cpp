#include "nhqc/cli.hpp"

int main(int argc, char** argv) { return nhqc::cli::dispatch(argc, argv); }
