#include "fundfreq_cli.hpp"

int main(int argc, char** argv) { return fundfreq::cli::run(argc, argv); }
