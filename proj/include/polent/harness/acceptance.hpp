#pragma once

#include <ostream>

namespace polent::harness {

/// Runs every acceptance criterion at its pinned tolerance, printing one
/// pass/fail line per criterion. Returns the number of failed criteria.
/// Backs both the `verify` CLI subcommand and the acceptance test binary.
int run_acceptance(std::ostream& out);

}  // namespace polent::harness
