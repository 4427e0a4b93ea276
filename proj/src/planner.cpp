#include "planlab/planner.hpp"

#include <algorithm>
#include <chrono>
#include <deque>
#include <map>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "planlab/util.hpp"

namespace planlab::planner {

using pddl::Atom;
using pddl::Literal;
using pddl::Term;

PlanError::PlanError(Kind k, const std::string& msg)
    : std::runtime_error(msg), kind(k) {}

const char* status_name(PlanResult::Status s) {
  switch (s) {
    case PlanResult::Status::plan: return "PLAN";
    case PlanResult::Status::no_solution: return "NO-SOLUTION";
    case PlanResult::Status::timeout: return "TIMEOUT";
    case PlanResult::Status::format_error: return "FORMAT-ERROR";
  }
  return "?";
}

State initial_state(const pddl::Problem& p) {
  State s = p.init;  // already sorted+deduped by normalize
  return s;
}

bool holds(const State& s, const Atom& a) {
  return std::binary_search(s.begin(), s.end(), a);
}

bool satisfied(const State& s, const std::vector<Literal>& conj) {
  for (const auto& l : conj)
    if (holds(s, l.atom) != l.positive) return false;
  return true;
}

std::optional<Literal> first_unsatisfied(const State& s,
                                         const std::vector<Literal>& conj) {
  for (const auto& l : conj)
    if (holds(s, l.atom) != l.positive) return l;
  return std::nullopt;
}

namespace {

Atom substitute(const Atom& a,
                const std::unordered_map<std::string, std::string>& bind) {
  Atom out;
  out.pred = a.pred;
  out.args.reserve(a.args.size());
  for (const auto& t : a.args)
    out.args.push_back(Term::constant(bind.at(t.name)));
  return out;
}

std::string action_label(const std::string& name,
                         const std::vector<std::string>& args) {
  std::string out = "(" + name;
  for (const auto& a : args) out += " " + a;
  return out + ")";
}

GroundAction instantiate(const pddl::ActionSchema& schema,
                         const std::vector<std::string>& args) {
  std::unordered_map<std::string, std::string> bind;
  for (size_t i = 0; i < schema.parameters.size(); ++i)
    bind[schema.parameters[i].name] = args[i];
  GroundAction g;
  g.schema = schema.name;
  g.args = args;
  for (const auto& l : schema.precondition)
    g.pre.push_back({l.positive, substitute(l.atom, bind)});
  for (const auto& l : schema.effect)
    g.eff.push_back({l.positive, substitute(l.atom, bind)});
  std::sort(g.pre.begin(), g.pre.end());
  std::sort(g.eff.begin(), g.eff.end());
  g.label = action_label(g.schema, g.args);
  return g;
}

}  // namespace

std::vector<GroundAction> ground(const pddl::Domain& d, const pddl::Problem& p) {
  link(p, d);
  // Objects usable for a given parameter type under the flat hierarchy.
  std::map<std::string, std::vector<std::string>> by_type;
  for (const auto& o : p.objects) {
    by_type[o.type].push_back(o.name);
    if (o.type != "object") by_type["object"].push_back(o.name);
  }

  std::vector<GroundAction> out;
  for (const auto& a : d.actions) {
    std::vector<const std::vector<std::string>*> pools;
    bool empty_pool = false;
    for (const auto& par : a.parameters) {
      auto it = by_type.find(par.type);
      if (it == by_type.end() || it->second.empty()) {
        empty_pool = true;
        break;
      }
      pools.push_back(&it->second);
    }
    if (empty_pool) continue;  // empty product: zero instantiations, no error
    std::vector<std::string> args(a.parameters.size());
    std::vector<size_t> idx(a.parameters.size(), 0);
    bool done = false;
    while (!done) {
      for (size_t i = 0; i < idx.size(); ++i) args[i] = (*pools[i])[idx[i]];
      out.push_back(instantiate(a, args));
      if (idx.empty()) break;  // 0-parameter action: exactly one instance
      size_t i = idx.size() - 1;
      while (true) {
        if (++idx[i] < pools[i]->size()) break;
        idx[i] = 0;
        if (i == 0) {
          done = true;
          break;
        }
        --i;
      }
    }
  }
  std::sort(out.begin(), out.end(),
            [](const GroundAction& x, const GroundAction& y) {
              return x.label < y.label;
            });
  return out;
}

State apply(const State& s, const GroundAction& a) {
  if (auto bad = first_unsatisfied(s, a.pre))
    throw PlanError(PlanError::Kind::not_applicable,
                    "precondition " + pddl::render_literal(*bad) +
                        " of " + a.label + " does not hold");
  State next = s;
  // Delete before add.
  for (const auto& l : a.eff)
    if (!l.positive) {
      auto it = std::lower_bound(next.begin(), next.end(), l.atom);
      if (it != next.end() && *it == l.atom) next.erase(it);
    }
  for (const auto& l : a.eff)
    if (l.positive) {
      auto it = std::lower_bound(next.begin(), next.end(), l.atom);
      if (it == next.end() || !(*it == l.atom)) next.insert(it, l.atom);
    }
  return next;
}

namespace {

// Interned representation used only inside solve(): atoms become dense ids,
// states become sorted id vectors.
struct Interner {
  std::map<Atom, uint32_t> ids;
  uint32_t intern(const Atom& a) {
    auto [it, fresh] = ids.emplace(a, static_cast<uint32_t>(ids.size()));
    (void)fresh;
    return it->second;
  }
};

struct IntAction {
  std::vector<uint32_t> pre_pos, pre_neg, add, del;
  size_t index;  // into the ground action list
};

using IntState = std::vector<uint32_t>;

struct StateHash {
  size_t operator()(const IntState& s) const {
    uint64_t h = 1469598103934665603ULL;
    for (uint32_t v : s) {
      h ^= v;
      h *= 1099511628211ULL;
    }
    return static_cast<size_t>(h);
  }
};

bool contains(const IntState& s, uint32_t v) {
  return std::binary_search(s.begin(), s.end(), v);
}

}  // namespace

PlanResult solve(const pddl::Domain& d, const pddl::Problem& p,
                 const SearchLimits& lim) {
  PlanResult res;
  std::vector<GroundAction> actions;
  try {
    actions = ground(d, p);
  } catch (const pddl::ParseError& e) {
    res.status = PlanResult::Status::format_error;
    res.detail = e.what();
    return res;
  }

  Interner interner;
  IntState init;
  for (const auto& a : p.init) init.push_back(interner.intern(a));
  std::sort(init.begin(), init.end());

  std::vector<uint32_t> goal_pos, goal_neg;
  for (const auto& l : p.goal)
    (l.positive ? goal_pos : goal_neg).push_back(interner.intern(l.atom));

  std::vector<IntAction> acts;
  acts.reserve(actions.size());
  for (size_t i = 0; i < actions.size(); ++i) {
    IntAction ia;
    ia.index = i;
    for (const auto& l : actions[i].pre)
      (l.positive ? ia.pre_pos : ia.pre_neg).push_back(interner.intern(l.atom));
    for (const auto& l : actions[i].eff)
      (l.positive ? ia.add : ia.del).push_back(interner.intern(l.atom));
    acts.push_back(std::move(ia));
  }

  auto goal_holds = [&](const IntState& s) {
    for (uint32_t g : goal_pos)
      if (!contains(s, g)) return false;
    for (uint32_t g : goal_neg)
      if (contains(s, g)) return false;
    return true;
  };
  auto applicable = [&](const IntState& s, const IntAction& a) {
    for (uint32_t q : a.pre_pos)
      if (!contains(s, q)) return false;
    for (uint32_t q : a.pre_neg)
      if (contains(s, q)) return false;
    return true;
  };
  auto successor = [&](const IntState& s, const IntAction& a) {
    IntState next;
    next.reserve(s.size() + a.add.size());
    for (uint32_t v : s)
      if (!std::binary_search(a.del.begin(), a.del.end(), v))
        next.push_back(v);
    for (uint32_t v : a.add) {
      auto it = std::lower_bound(next.begin(), next.end(), v);
      if (it == next.end() || *it != v) next.insert(it, v);
    }
    return next;
  };
  for (auto& a : acts) {
    std::sort(a.del.begin(), a.del.end());
    std::sort(a.add.begin(), a.add.end());
  }

  struct Node {
    IntState state;
    int64_t parent;
    size_t action;
  };
  std::deque<Node> nodes;
  std::unordered_set<IntState, StateHash> visited;
  auto extract = [&](size_t at) {
    std::vector<GroundAction> steps;
    while (nodes[at].parent >= 0) {
      steps.push_back(actions[nodes[at].action]);
      at = static_cast<size_t>(nodes[at].parent);
    }
    std::reverse(steps.begin(), steps.end());
    return steps;
  };

  const auto t0 = std::chrono::steady_clock::now();
  auto timed_out = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
               .count() > lim.wall_clock_cap;
  };

  if (goal_holds(init)) {
    res.status = PlanResult::Status::plan;
    return res;  // empty plan
  }

  nodes.push_back({init, -1, 0});
  visited.insert(init);
  size_t head = 0;
  while (head < nodes.size()) {
    if (res.expanded >= lim.max_expanded_states) {
      res.status = PlanResult::Status::timeout;
      return res;
    }
    if ((res.expanded & 0xff) == 0 && timed_out()) {
      res.status = PlanResult::Status::timeout;
      return res;
    }
    IntState cur = nodes[head].state;  // copy: deque may grow below
    ++res.expanded;
    for (const auto& a : acts) {
      if (!applicable(cur, a)) continue;
      IntState next = successor(cur, a);
      if (!visited.insert(next).second) continue;
      nodes.push_back({std::move(next), static_cast<int64_t>(head), a.index});
      if (goal_holds(nodes.back().state)) {
        res.status = PlanResult::Status::plan;
        res.steps = extract(nodes.size() - 1);
        return res;
      }
    }
    ++head;
  }
  res.status = PlanResult::Status::no_solution;
  return res;
}

ValidationReport validate_plan(const pddl::Domain& d, const pddl::Problem& p,
                               const std::vector<PlanStep>& plan) {
  link(p, d);
  std::map<std::string, std::string> obj_type;
  for (const auto& o : p.objects) obj_type[o.name] = o.type;

  std::vector<GroundAction> ground_steps;
  for (const auto& step : plan) {
    const pddl::ActionSchema* schema = d.find_action(step.schema);
    if (!schema)
      throw PlanError(PlanError::Kind::unknown_action,
                      "unknown action '" + step.schema + "'");
    if (schema->parameters.size() != step.args.size())
      throw PlanError(PlanError::Kind::unknown_action,
                      "action '" + step.schema + "' takes " +
                          std::to_string(schema->parameters.size()) +
                          " arguments, got " + std::to_string(step.args.size()));
    for (size_t i = 0; i < step.args.size(); ++i) {
      auto it = obj_type.find(step.args[i]);
      if (it == obj_type.end())
        throw PlanError(PlanError::Kind::unknown_object,
                        "undeclared object '" + step.args[i] + "' in " +
                            action_label(step.schema, step.args));
      if (!pddl::type_compatible(it->second, schema->parameters[i].type))
        throw PlanError(PlanError::Kind::type_mismatch,
                        "object '" + step.args[i] + "' : " + it->second +
                            " where " + step.schema + " wants " +
                            schema->parameters[i].type);
    }
    ground_steps.push_back(instantiate(*schema, step.args));
  }

  ValidationReport report;
  State s = initial_state(p);
  for (size_t i = 0; i < ground_steps.size(); ++i) {
    if (auto bad = first_unsatisfied(s, ground_steps[i].pre)) {
      report.accepted = false;
      report.failing_step = static_cast<int>(i);
      report.diagnostic = "step " + std::to_string(i) + " " +
                          ground_steps[i].label + ": precondition " +
                          pddl::render_literal(*bad) + " does not hold";
      return report;
    }
    s = planlab::planner::apply(s, ground_steps[i]);
  }
  if (auto bad = first_unsatisfied(s, p.goal)) {
    report.accepted = false;
    report.failing_step = -1;
    report.diagnostic =
        "goal literal " + pddl::render_literal(*bad) + " not satisfied";
    return report;
  }
  report.accepted = true;
  return report;
}

std::vector<PlanStep> parse_plan(const std::string& text) {
  std::vector<PlanStep> out;
  for (auto& raw : split_lines(text)) {
    std::string line = raw.substr(0, raw.find(';'));
    // trim
    size_t b = line.find_first_not_of(" \t");
    if (b == std::string::npos) continue;
    size_t e = line.find_last_not_of(" \t");
    line = line.substr(b, e - b + 1);
    if (line.empty()) continue;
    if (line.front() != '(' || line.back() != ')')
      throw PlanError(PlanError::Kind::unknown_action,
                      "plan line must be '(action args...)': " + line);
    std::string inner = line.substr(1, line.size() - 2);
    PlanStep step;
    std::string tok;
    for (char c : inner + " ") {
      if (c == ' ' || c == '\t') {
        if (!tok.empty()) {
          if (step.schema.empty())
            step.schema = lowercased(tok);
          else
            step.args.push_back(lowercased(tok));
          tok.clear();
        }
      } else {
        tok.push_back(c);
      }
    }
    if (step.schema.empty())
      throw PlanError(PlanError::Kind::unknown_action, "empty plan step");
    out.push_back(std::move(step));
  }
  return out;
}

std::string render_plan(const std::vector<GroundAction>& steps) {
  std::string out;
  for (const auto& s : steps) out += s.label + "\n";
  return out;
}

}  // namespace planlab::planner
