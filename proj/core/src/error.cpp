#include "olab/error.hpp"

namespace olab {

void fail_domain(const std::string& what) { throw DomainError(what); }

}  // namespace olab
