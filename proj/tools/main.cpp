#include "cli_app.hpp"

int main(int argc, char** argv) { return salpchain::cli::cliMain(argc, argv); }
