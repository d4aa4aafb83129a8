#pragma once

// Roles, tuples and the BIO tag inventory shared by the corpus reader,
// the tagger and the scorers.

#include <compare>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace smile {

inline constexpr int kDefaultMaxArg = 5;

// Inclusive token range.
struct Span {
  int start = 0;
  int end = 0;

  int length() const { return end - start + 1; }
  bool contains(int i) const { return start <= i && i <= end; }
  bool overlaps(const Span& o) const { return start <= o.end && o.start <= end; }
  auto operator<=>(const Span&) const = default;
};

// Role 0 is REL; role k + 1 is ARGk.
using RoleId = int;
inline constexpr RoleId kRelRole = 0;
inline constexpr RoleId arg_role(int k) { return k + 1; }

std::string role_name(RoleId role);
// Returns nullopt for anything that is not REL or ARG<k>.
std::optional<RoleId> parse_role(std::string_view name);

struct Tuple {
  std::map<RoleId, Span> spans;
  double confidence = 1.0;
  int indicator_verb = -1;

  bool has_rel() const { return spans.count(kRelRole) > 0; }
};

// Tag ids: 0 = O, 1 + 2r = B-role(r), 2 + 2r = I-role(r).
class TagSet {
 public:
  explicit TagSet(int max_arg = kDefaultMaxArg);

  int max_arg() const { return max_arg_; }
  int num_roles() const { return max_arg_ + 2; }
  int size() const { return 1 + 2 * num_roles(); }

  static constexpr int outside() { return 0; }
  static int begin_tag(RoleId role) { return 1 + 2 * role; }
  static int inside_tag(RoleId role) { return 2 + 2 * role; }
  static bool is_begin(int tag) { return tag > 0 && tag % 2 == 1; }
  static bool is_inside(int tag) { return tag > 0 && tag % 2 == 0; }
  static RoleId role_of(int tag) { return (tag - 1) / 2; }

  bool valid_role(RoleId role) const { return role >= 0 && role < num_roles(); }
  std::string name(int tag) const;
  std::optional<int> parse(std::string_view name) const;

 private:
  int max_arg_;
};

// BIO labels for a tuple over an n-token sentence; all O when tuple is empty.
std::vector<int> encode_bio(const std::optional<Tuple>& tuple, int n);

// No I-X appears without an opening B-X (or I-X) of the same role just before.
bool is_well_formed_bio(const std::vector<int>& labels);

}  // namespace smile
