#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "equix/dtd.hpp"
#include "equix/query.hpp"

namespace equix {

struct ResultDtd {
  Dtd dtd;
  // Name of the originating DTD (catalog or parent result set).
  std::string origin;
  std::string query_id;
};

// Labels of element output nodes and of the elements owning attribute output
// nodes, together with everything they may be nested in or may contain
// (containment only for element outputs). Declaration order of `d`.
std::vector<std::string> element_name_set(const AbstractQuery& q, const Dtd& d);

// Content definition of `e` in the result DTD, already simplified. Throws
// DtdError when `e` is not declared in `d`.
ContentModel create_content_definition(std::string_view e, const AbstractQuery& q, const Dtd& d);

// Removes null sub-expressions bottom-up; a fully null expression becomes
// EMPTY.
ContentModel simplify(const ContentModel& model);

// Throws ValidationError when the query has no output node.
ResultDtd create_result_dtd(const AbstractQuery& q, const Dtd& d, std::string origin = {},
                            std::string query_id = {});

}  // namespace equix
