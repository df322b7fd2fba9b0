#include "sitesel_cli/app.hpp"

int main(int argc, char** argv) { return sitesel::cli::run_cli(argc, argv); }
