#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <ostream>

namespace equix {

// Dense index into a document or a query tree. The tag keeps the two id
// spaces from being mixed up.
template <class Tag>
struct Id {
  std::uint32_t value = 0;

  friend constexpr auto operator<=>(Id, Id) = default;
  friend std::ostream& operator<<(std::ostream& os, Id id) { return os << id.value; }
};

using NodeId = Id<struct DocumentNodeTag>;
using QueryNodeId = Id<struct QueryNodeTag>;

}  // namespace equix

template <class Tag>
struct std::hash<equix::Id<Tag>> {
  std::size_t operator()(equix::Id<Tag> id) const noexcept {
    return std::hash<std::uint32_t>{}(id.value);
  }
};
