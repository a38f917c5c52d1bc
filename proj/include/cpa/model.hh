/* model.hh -- cost probabilistic automata: distributions, transitions, parsing */
#pragma once

#include <functional>
#include <map>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "cpa/rational.hh"

namespace cpa {

/// Sentinel for the reserved surface token "tau": the generic internal
/// (weak) transition label.  Never a declared action; any internally
/// labelled step counts as tau under trace erasure.
inline constexpr int kTau = -1;

/// Finite-support discrete (sub-)probability distribution over state
/// ids.  Entries are kept sorted by state with strictly positive
/// weights; total mass is at most 1, exactly 1 for "full"
/// distributions.
class Distribution {
 public:
  Distribution() = default;
  explicit Distribution(std::vector<std::pair<int, Rat>> entries);

  /// Accumulate `weight` onto `state`; entries reaching zero are
  /// erased.  Throws WeightError if an entry would become negative.
  void add(int state, const Rat& weight);

  const std::vector<std::pair<int, Rat>>& entries() const { return w_; }
  Rat at(int state) const;
  Rat mass() const;
  bool full() const { return mass() == 1; }
  std::size_t support_size() const { return w_.size(); }
  bool operator==(const Distribution& o) const { return w_ == o.w_; }

 private:
  std::vector<std::pair<int, Rat>> w_;
};

/// Dirac distribution: all mass on one state.
Distribution dirac(int state);

/// Convex combination Σ wᵢ·dᵢ.  Weights must be positive and sum to 1
/// (WeightError otherwise).
Distribution convex_combine(
    const std::vector<std::pair<Rat, Distribution>>& parts);

/// Product distribution (d1 × d2)(u,v) = d1(u)·d2(v).  The caller
/// supplies the pairing of the two state universes into the product
/// universe.
Distribution product(const Distribution& d1, const Distribution& d2,
                     const std::function<int(int, int)>& pair_id);

enum class ActionKind { External, Internal };

/// One transition src --action(cost)--> target, target a full
/// distribution and cost >= 0.
struct Transition {
  int src = -1;
  int action = -1;
  Rat cost;
  Distribution target;
};

/// A cost probabilistic automaton.  State and action ids are dense
/// indices in declaration order; all iteration in the library follows
/// this order so results are reproducible.  Instances are immutable
/// after construction (finalize()) and safe to share across threads.
struct Cpa {
  std::string name;
  std::vector<std::string> states;
  std::unordered_map<std::string, int> state_index;
  int start = -1;
  std::vector<std::string> actions;
  std::unordered_map<std::string, int> action_index;
  std::vector<ActionKind> kinds;  // parallel to `actions`
  std::vector<Transition> transitions;
  std::vector<std::vector<int>> out;  // state -> transition indices

  int add_state(const std::string& id);
  int add_action(const std::string& id, ActionKind kind);
  /// Rebuild derived indices (`out`); call after filling fields.
  void finalize();

  int state_id(const std::string& id) const;   // throws UnknownState
  int action_id(const std::string& id) const;  // throws UnknownAction
  bool is_internal(int action) const {
    return kinds[action] == ActionKind::Internal;
  }
  bool is_external(int action) const { return !is_internal(action); }
  int n_states() const { return static_cast<int>(states.size()); }
};

struct ParseResult {
  Cpa model;
  std::vector<std::string> warnings;  // e.g. pruned unreachable states
};

/// Parse the line-oriented model format (see README).  Unreachable
/// states are pruned with a warning.  Throws ParseError on syntax
/// errors and ValidationError on semantic violations (mass != 1,
/// negative cost, duplicate or undeclared names, "tau" declared, ...).
ParseResult parse_model(const std::string& text);

/// Serialize back to the model format; parse_model(serialize_model(a))
/// is identical to `a`.
std::string serialize_model(const Cpa& a);

/// Strong combined transition: convex combination of equally labelled
/// transitions from one source.  Returns (Σ pᵢ·μᵢ, Σ pᵢ·c(trᵢ)).
/// Throws MixedTransitions if sources or actions differ, WeightError
/// if the weights do not sum to 1.
std::pair<Distribution, Rat> strong_combined_cost(
    const std::vector<std::pair<Rat, Transition>>& components);

/// A horizon-bounded MDP policy.  `choice` maps an execution fragment
/// (alternating state/action ids, starting and ending with a state) to
/// a distribution over enabled actions; when `stationary`, lookup uses
/// only the last state (key {state}).
struct MdpPolicy {
  int horizon = 0;
  bool stationary = false;
  std::map<std::vector<int>, std::vector<std::pair<int, Rat>>> choice;

  /// nullptr when the policy makes no choice for this fragment.
  const std::vector<std::pair<int, Rat>>* lookup(
      const std::vector<int>& frag) const;
};

/// Expected total reward with horizon N: Σ_{|α|=N} r(α)·Prob(α),
/// computed by exact enumeration of length-N fragments.  Transition
/// costs play the role of rewards r(s,a).  Throws NotAnMdp if some
/// state enables two transitions with the same action.
Rat mdp_expected_total_reward(const Cpa& m, const MdpPolicy& policy);

/// Disjoint union of two automata with renamed states.  `side[s]` is 0
/// or 1 for the automaton of origin, `orig[s]` the state id there.
/// The union has two distinguished starts; `model.start` is start1 and
/// must not be read as a single start state.
struct DisjointUnion {
  Cpa model;
  int start1 = -1;
  int start2 = -1;
  std::vector<int> side;
  std::vector<int> orig;
};

/// Throws AlphabetClash if an action is external on one side and
/// internal on the other.
DisjointUnion disjoint_union(const Cpa& a1, const Cpa& a2);

}  // namespace cpa
