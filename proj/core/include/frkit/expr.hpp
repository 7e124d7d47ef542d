#ifndef FRKIT_EXPR_HPP
#define FRKIT_EXPR_HPP

#include <map>
#include <string>

#include "frkit/rational_fn.hpp"

namespace frkit {

/// Parse an arithmetic expression in the variable z into a rational function.
/// Supported: integers, fractions via '/', identifiers bound by `params`,
/// + - * / ^, parentheses, and implicit multiplication ("2z", "z(z-1)").
RationalFn<Rational> parse_ratfn(const std::string& text,
                                 const std::map<std::string, Rational>& params = {});

}  // namespace frkit

#endif
