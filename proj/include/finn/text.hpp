#pragma once

#include <string>
#include <vector>

namespace finn {

/// Split on a single-character delimiter; n delimiters yield n+1 tokens.
std::vector<std::string> split_line(const std::string& line, char delim);

/// Drop one trailing carriage return, normalizing CRLF input lines.
std::string strip_cr(std::string s);

/// Full-string finite double; `what` labels the error message.
double parse_double(const std::string& text, const std::string& what);

/// Full-string unsigned decimal.
std::size_t parse_size(const std::string& text, const char* what);

/// Round-trip-exact decimal form (%.17g).
std::string format_double(double v);

}  // namespace finn
