#include "biloc/cli.hpp"

int main(int argc, char** argv) { return biloc::run_main(argc, argv); }
