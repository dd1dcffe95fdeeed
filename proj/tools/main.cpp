#include "cli.hpp"

#include <string>
#include <vector>

int main(int argc, char** argv) {
    return sojourn::cli::run(std::vector<std::string>(argv, argv + argc));
}
