#include "porofrac/postio.hpp"

int main(int argc, char** argv) { return porofrac::cli_main(argc, argv); }
