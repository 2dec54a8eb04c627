#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace vcnet {

struct error : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

// Malformed text input. `where` is a 1-based line number for line-oriented
// formats and a 0-based character offset for formulas.
struct parse_error : error
{
    parse_error(std::size_t where, const std::string& what)
        : error(what), where{where}
    {}
    std::size_t where;
};

struct not_enabled_error : error
{
    using error::error;
};

// A firing would put a second token on a place.
struct one_safety_violation : error
{
    one_safety_violation(const std::string& transition, const std::string& place)
        : error("one-safety violation: firing '" + transition + "' puts a second token on '" + place + "'"),
          transition{transition},
          place{place}
    {}
    std::string transition;
    std::string place;
};

struct limit_exceeded : error
{
    limit_exceeded(const std::string& what, std::size_t explored)
        : error(what + " (explored " + std::to_string(explored) + ")"), explored{explored}
    {}
    std::size_t explored;
};

struct structural_violation : error
{
    using error::error;
};

struct invalid_cover : error
{
    using error::error;
};

struct alphabet_mismatch : error
{
    using error::error;
};

struct malformed_instance : error
{
    using error::error;
};

} // namespace vcnet
