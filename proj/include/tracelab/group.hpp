#pragma once

#include <string>

#include <json.hpp>

#include "tracelab/ff.hpp"

namespace tracelab {

enum class GroupKind { GL, SL, Sp, SO_odd, SO_plus, mu };

std::string to_string(GroupKind kind);
GroupKind parse_group_kind(const std::string& text);

/// A finite monodromy group over the residue field F_l.
struct GroupSpec {
  GroupKind kind = GroupKind::SL;
  /// Matrix size, or the order d for mu.
  u64 size = 2;
  Field field;

  GroupSpec(GroupKind kind, u64 size, Field field);

  bool classical() const { return kind != GroupKind::mu; }
  std::string name() const;
  nlohmann::json to_json() const;
};

}  // namespace tracelab
