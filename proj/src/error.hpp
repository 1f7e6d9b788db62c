// One exception type for the whole core; the C boundary maps codes 1:1 onto
// the public status enum.
#pragma once

#include <stdexcept>
#include <string>

namespace ssmix {

enum class ErrorCode {
    invalid_argument = 1,
    parse_error = 2,
    io_error = 3,
    infeasible = 4,
    budget_exceeded = 5,
    no_cutset = 6,
    block_spans_graph = 7,
    no_initial_coloring = 8,
    check_failed = 9,
    internal = 10,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace ssmix
