#ifndef CUTFRAC_DOMAIN_IO_HPP
#define CUTFRAC_DOMAIN_IO_HPP

#include <string>

#include "cutfrac/domain.hpp"

namespace cutfrac {

/// Parses a domain description from JSON text; validates all invariants.
/// Unknown keys are rejected.
FracturedDomain load_domain_json(const std::string& json_text);

FracturedDomain load_domain_file(const std::string& path);

} // namespace cutfrac

#endif
