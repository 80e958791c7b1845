#pragma once

#include <algorithm>
#include <initializer_list>
#include <string>
#include <vector>

namespace faircheck {

/// A finite set of action labels, stored either literally or as the
/// complement of a literal set relative to the owning LTS's alphabet.
/// Complement is resolved only when the set is materialized against a
/// concrete alphabet; until then the algebra below is closed over both
/// representations.
struct ActionSet {
  std::vector<std::string> members;  // sorted, no duplicates
  bool complemented = false;

  ActionSet() = default;

  static ActionSet none() { return ActionSet{}; }

  static ActionSet all() {
    ActionSet s;
    s.complemented = true;
    return s;
  }

  static ActionSet single(std::string label) {
    ActionSet s;
    s.members.push_back(std::move(label));
    return s;
  }

  static ActionSet of(std::vector<std::string> labels) {
    ActionSet s;
    s.members = std::move(labels);
    std::sort(s.members.begin(), s.members.end());
    s.members.erase(std::unique(s.members.begin(), s.members.end()), s.members.end());
    return s;
  }

  static ActionSet of(std::initializer_list<std::string> labels) {
    return of(std::vector<std::string>(labels));
  }

  bool is_literal() const { return !complemented; }
  bool is_literal_empty() const { return !complemented && members.empty(); }
  bool is_full() const { return complemented && members.empty(); }

  bool contains(const std::string& label) const {
    bool member = std::binary_search(members.begin(), members.end(), label);
    return complemented ? !member : member;
  }

  ActionSet complement() const {
    ActionSet s = *this;
    s.complemented = !s.complemented;
    return s;
  }

  friend bool operator==(const ActionSet& a, const ActionSet& b) {
    return a.complemented == b.complemented && a.members == b.members;
  }
  friend bool operator!=(const ActionSet& a, const ActionSet& b) { return !(a == b); }
  friend bool operator<(const ActionSet& a, const ActionSet& b) {
    if (a.complemented != b.complemented) return !a.complemented;
    return a.members < b.members;
  }

  /// Concrete members relative to `alphabet` (sorted).
  std::vector<std::string> materialize(const std::vector<std::string>& alphabet) const {
    std::vector<std::string> out;
    for (const auto& a : alphabet) {
      if (contains(a)) out.push_back(a);
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  bool empty_in(const std::vector<std::string>& alphabet) const {
    for (const auto& a : alphabet) {
      if (contains(a)) return false;
    }
    return true;
  }
};

namespace detail {

inline std::vector<std::string> sorted_union(const std::vector<std::string>& a,
                                             const std::vector<std::string>& b) {
  std::vector<std::string> out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

inline std::vector<std::string> sorted_inter(const std::vector<std::string>& a,
                                             const std::vector<std::string>& b) {
  std::vector<std::string> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

inline std::vector<std::string> sorted_diff(const std::vector<std::string>& a,
                                            const std::vector<std::string>& b) {
  std::vector<std::string> out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

}  // namespace detail

inline ActionSet set_union(const ActionSet& a, const ActionSet& b) {
  ActionSet out;
  if (!a.complemented && !b.complemented) {
    out.members = detail::sorted_union(a.members, b.members);
  } else if (!a.complemented && b.complemented) {
    // L u ~M = ~(M \ L)
    out.complemented = true;
    out.members = detail::sorted_diff(b.members, a.members);
  } else if (a.complemented && !b.complemented) {
    out.complemented = true;
    out.members = detail::sorted_diff(a.members, b.members);
  } else {
    out.complemented = true;
    out.members = detail::sorted_inter(a.members, b.members);
  }
  return out;
}

inline ActionSet set_intersect(const ActionSet& a, const ActionSet& b) {
  return set_union(a.complement(), b.complement()).complement();
}

inline ActionSet set_difference(const ActionSet& a, const ActionSet& b) {
  return set_intersect(a, b.complement());
}

}  // namespace faircheck
