#include "flowgraph/cli.hpp"

int main(int argc, char** argv)
{
    return flowgraph::cli::run(argc, argv);
}
