#include <divilab/cli/dispatch.hpp>

int main(int argc, char** argv) { return divilab::cli::dispatch(argc, argv); }
