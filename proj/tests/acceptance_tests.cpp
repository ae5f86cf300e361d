// Acceptance gate: every criterion at its pinned tolerance, one line each.

#include <iostream>

#include "polent/harness/acceptance.hpp"

int main() {
  const int failures = polent::harness::run_acceptance(std::cout);
  return failures == 0 ? 0 : 1;
}
