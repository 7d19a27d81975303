#include "causalsens/cli.hpp"

int main(int argc, char** argv) { return causalsens::run(argc, argv); }
