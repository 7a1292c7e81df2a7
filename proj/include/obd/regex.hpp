#pragma once

// Regular expressions over tuple letters, compiled to automata restricted to
// canonical representations.

#include "obd/automaton.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace obd {

class RegexError : public std::runtime_error {
 public:
  RegexError(const std::string& message, std::size_t position);
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

/// Letters are "[d1,...,dk]" or bare digits when k = 1.  Operators: '|'
/// alternation, juxtaposition, postfix '*', '+' and '?', parentheses.  A '+'
/// directly followed by the start of an atom is alternation.
/// `alphabets`, when given, lists the admissible digits of every track.
Automaton regex_compile(const SystemPtr& sys, int arity, std::string_view pattern,
                        const std::optional<std::vector<std::vector<int>>>& alphabets = std::nullopt);

}  // namespace obd
