#include <isoboltz/cli.hpp>

int main(int argc, char** argv) { return isoboltz::dispatch(argc, argv); }
