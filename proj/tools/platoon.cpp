#include "platoon/cli/app.hpp"

int main(int argc, char** argv) { return platoon::cli::run(argc, argv); }
