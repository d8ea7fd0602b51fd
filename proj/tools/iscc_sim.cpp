#include "iscc/cli.hpp"

int main(int argc, char** argv) { return iscc::parse_and_dispatch(argc, argv); }
