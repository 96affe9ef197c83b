#include "infbo/harness.hpp"

int main(int argc, char** argv) { return infbo::cli_main(argc, argv); }
