#include "app.hpp"

int main(int argc, char** argv) { return lyzero::cli::main_entry(argc, argv); }
