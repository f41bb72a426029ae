#include <lmsurf/cli.hpp>

int main(int argc, char** argv)
{
    return lmsurf::cli::run(std::vector<std::string>(argv + 1, argv + argc));
}
