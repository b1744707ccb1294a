// Copyright 2026 The msum Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace msum::cli {

/// Runs one command. `args` excludes the program name. Returns the process
/// exit status: 0 on success, 1 for command errors, 2 for usage errors.
/// Failures print exactly one line to `err`:
///   msum: error: <kind>: <message>
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace msum::cli
