#include "viscontact/cli.hpp"

int main(int argc, char** argv) { return viscontact::cli_main(argc, argv); }
