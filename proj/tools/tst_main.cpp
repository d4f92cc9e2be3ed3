#include <unistd.h>

#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "tst/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    std::string input;
    if (!isatty(fileno(stdin))) {  // piped model, e.g. `tst example ... | tst solve`
        std::ostringstream ss;
        ss << std::cin.rdbuf();
        input = ss.str();
    }
    tst::CliResult r = tst::run_cli(args, input);
    std::cout << r.out;
    std::cerr << r.err;
    return r.code;
}
