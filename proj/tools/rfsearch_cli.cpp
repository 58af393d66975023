#include <cstdio>

int main() {
  std::puts("rfsearch: placeholder");
  return 0;
}
