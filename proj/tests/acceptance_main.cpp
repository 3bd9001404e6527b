// Acceptance suite runner: one line per criterion, exit 0 iff all pass.
#include <cstring>
#include <iostream>
#include <optional>

#include "posner/acceptance.hpp"

int main(int argc, char** argv) {
    std::optional<int> only;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) only = std::atoi(argv[++i]);
    }
    bool all = true;
    for (const auto& c : posner::run_acceptance(only)) {
        std::cout << "criterion " << c.id << " [" << c.name << "]: "
                  << (c.pass ? "PASS" : "FAIL") << "  (" << c.detail << ")\n";
        all = all && c.pass;
    }
    return all ? 0 : 3;
}
