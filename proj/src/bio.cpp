#include "smile/bio.hpp"

#include <charconv>

namespace smile {

std::string role_name(RoleId role) {
  if (role == kRelRole) return "REL";
  return "ARG" + std::to_string(role - 1);
}

std::optional<RoleId> parse_role(std::string_view name) {
  if (name == "REL") return kRelRole;
  if (name.size() < 4 || name.substr(0, 3) != "ARG") return std::nullopt;
  std::string_view digits = name.substr(3);
  int k = 0;
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), k);
  if (ec != std::errc() || ptr != digits.data() + digits.size() || k < 0)
    return std::nullopt;
  if (digits.size() > 1 && digits[0] == '0') return std::nullopt;
  return arg_role(k);
}

TagSet::TagSet(int max_arg) : max_arg_(max_arg < 0 ? 0 : max_arg) {}

std::string TagSet::name(int tag) const {
  if (tag == outside()) return "O";
  return std::string(is_begin(tag) ? "B-" : "I-") + role_name(role_of(tag));
}

std::optional<int> TagSet::parse(std::string_view name) const {
  if (name == "O") return outside();
  if (name.size() < 3 || name[1] != '-') return std::nullopt;
  auto role = parse_role(name.substr(2));
  if (!role || !valid_role(*role)) return std::nullopt;
  if (name[0] == 'B') return begin_tag(*role);
  if (name[0] == 'I') return inside_tag(*role);
  return std::nullopt;
}

std::vector<int> encode_bio(const std::optional<Tuple>& tuple, int n) {
  std::vector<int> labels(static_cast<size_t>(n), TagSet::outside());
  if (!tuple) return labels;
  for (const auto& [role, span] : tuple->spans) {
    for (int i = span.start; i <= span.end; ++i) {
      labels[static_cast<size_t>(i)] =
          i == span.start ? TagSet::begin_tag(role) : TagSet::inside_tag(role);
    }
  }
  return labels;
}

bool is_well_formed_bio(const std::vector<int>& labels) {
  int prev = TagSet::outside();
  for (int tag : labels) {
    if (TagSet::is_inside(tag)) {
      if (prev == TagSet::outside() ||
          TagSet::role_of(prev) != TagSet::role_of(tag))
        return false;
    }
    prev = tag;
  }
  return true;
}

}  // namespace smile
