// Acceptance suite placeholder; populated after design bring-up.
#include <cstdio>
int main() {
  std::puts("acceptance suite pending");
  return 1;
}
