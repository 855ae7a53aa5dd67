#include <cstdio>
int main() {
    std::printf("acceptance suite not yet wired\n");
    return 1;
}
