#include "ssdbench/baselines.hpp"

#include "ssdbench/errors.hpp"

namespace ssdbench {

SpatialDistribution uniform_baseline(const Domain& domain, std::string_view label, Task kind) {
  validate_domain(domain);
  const std::size_t n = domain_size(domain);
  if (n == 0) throw InvalidInput("uniform baseline over an empty domain");
  return SpatialDistribution{domain, std::vector<double>(n, 1.0 / static_cast<double>(n)), std::string(label),
                             kind};
}

}  // namespace ssdbench
