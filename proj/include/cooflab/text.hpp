#ifndef COOFLAB_TEXT_HPP
#define COOFLAB_TEXT_HPP

#include <string>
#include <string_view>

namespace cooflab {

/// Shortest decimal form that parses back to the same double ("inf", "nan" included).
std::string format_double(double v);

/// Strict inverse of format_double; throws FormatError on trailing garbage.
double parse_double(std::string_view s);

}  // namespace cooflab

#endif  // COOFLAB_TEXT_HPP
