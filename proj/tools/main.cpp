#include "mtscore/cli.hpp"

int main(int argc, char** argv) { return mtscore::run_cli(argc, argv); }
