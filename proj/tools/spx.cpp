#include <cstdio>

int main(int argc, char** argv) {
    (void)argc;
    (void)argv;
    std::fputs("spx: not wired up yet\n", stderr);
    return 2;
}
