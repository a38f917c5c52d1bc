/* relations.hh -- binary relations, partitions, and the lifting L(R) */
#pragma once

#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "cpa/model.hh"
#include "cpa/rational.hh"

namespace cpa {

/// Relation R ⊆ L × R over two integer state universes, stored as a
/// bitmap.  For directed cost relations the left universe carries the
/// challenger (distribution) side.
class BinaryRelation {
 public:
  BinaryRelation(int left_n, int right_n)
      : left_n_(left_n), right_n_(right_n),
        bits_(static_cast<std::size_t>(left_n) * right_n, false) {}

  static BinaryRelation identity(int n);
  static BinaryRelation full(int left_n, int right_n);

  void set(int x, int y, bool v = true) { bits_[index(x, y)] = v; }
  bool test(int x, int y) const { return bits_[index(x, y)]; }
  int left_size() const { return left_n_; }
  int right_size() const { return right_n_; }
  std::size_t pair_count() const;
  bool operator==(const BinaryRelation& o) const = default;

 private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(x) * right_n_ + y;
  }
  int left_n_, right_n_;
  std::vector<bool> bits_;
};

/// Equivalence partition over universe {0..n-1}.  Canonical form:
/// class members ascending, classes ordered by least member.
struct Partition {
  int n = 0;
  std::vector<int> cls;                    // state -> class number
  std::vector<std::vector<int>> classes;   // canonical class list

  static Partition single(int n);    // one class
  static Partition discrete(int n);  // singletons
  static Partition from_classes(int n,
                                const std::vector<std::vector<int>>& classes);

  bool same(int x, int y) const { return cls[x] == cls[y]; }
  std::size_t size() const { return classes.size(); }
  /// Replace class `c` by `keep` and its complement (both nonempty).
  Partition split(int c, const std::vector<int>& keep) const;
  BinaryRelation as_relation() const;
  bool operator==(const Partition& o) const { return cls == o.cls; }
};

/// Weighting function witnessing μ L(R) ν: entries (x, y, w) with
/// w > 0, x R y, row sums μ(x), column sums ν(y).
struct WeightingFunction {
  std::vector<std::tuple<int, int, Rat>> entries;
};

/// Decide the lifting μ L(R) ν for full distributions via exact
/// integer max-flow (capacities scaled by the common denominator).
/// Returns a weighting function iff the lifting holds.  Throws
/// UniverseMismatch when supports fall outside R's universes,
/// WeightError when a distribution is not full.
std::optional<WeightingFunction> lift_check(const BinaryRelation& r,
                                            const Distribution& mu,
                                            const Distribution& nu);

/// {(x,z) : ∃y. x r1 y ∧ y r2 z}.  Throws UniverseMismatch unless
/// r1's right universe equals r2's left universe.
BinaryRelation relation_compose(const BinaryRelation& r1,
                                const BinaryRelation& r2);

/// Smallest equivalence containing both partitions (transitive merge
/// over the shared universe).  Throws UniverseMismatch on different
/// universe sizes.
Partition equivalence_compose(const Partition& p1, const Partition& p2);

/// R × I over pair states: {((w,y),(x,y)) : w r x, y ∈ third}.  Pair
/// (s, y) is encoded as s·third_n + y on both sides.
BinaryRelation cross_identity(const BinaryRelation& r, int third_n);

// ------------------------------------------------------- relation files

/// Parsed `pair`/`class` relation file (one record style per file).
struct RelationFile {
  bool classes_kind = false;
  std::vector<std::vector<std::string>> classes;
  std::vector<std::pair<std::string, std::string>> pairs;
};

/// Throws ParseError on syntax, MixedRelationKinds when both record
/// styles appear.
RelationFile parse_relation_text(const std::string& text);

/// Resolve a class-style file against an automaton's state names;
/// states not listed become singleton classes.
Partition resolve_classes(const RelationFile& f, const Cpa& a);

/// Resolve either file style to an n×n relation over `a`'s states
/// (class files resolve to their equivalence relation).
BinaryRelation resolve_relation(const RelationFile& f, const Cpa& a);

std::string serialize_partition(const Partition& p,
                                const std::vector<std::string>& names);
std::string serialize_pairs(const BinaryRelation& r,
                            const std::vector<std::string>& names);

}  // namespace cpa
