#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace scgid {

// Exit codes shared by every subcommand.
enum ExitCode : int {
    exit_yes = 0,         // separated / applicable / identifiable / hedge found / success
    exit_no = 1,          // the negative verdict
    exit_usage = 2,       // bad arguments, unreadable or malformed input
    exit_unknown = 3,     // identification undecided within the search budget
    exit_resource = 4,    // a size guard was exceeded
};

/// Runs the command line on `args` (without the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace scgid
