#include <cstdio>

int main() {
  std::puts("ffbench: command-line interface not wired up yet");
  return 3;
}
