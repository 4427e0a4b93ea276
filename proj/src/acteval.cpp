#include "planlab/acteval.hpp"

#include <algorithm>
#include <map>

namespace planlab::acteval {

using pddl::ActionSchema;
using pddl::Atom;
using pddl::Literal;
using pddl::Parameter;

namespace {

std::vector<Literal> rename_literals(
    const std::vector<Literal>& ls,
    const std::map<std::string, std::string>& sigma) {
  std::vector<Literal> out = ls;
  for (auto& l : out)
    for (auto& t : l.atom.args) t.name = sigma.at(t.name);
  std::sort(out.begin(), out.end());
  return out;
}

// All type-respecting bijections a.parameters -> b.parameters, applied to
// `check` until one passes. Permutes within type groups only.
bool exists_bijection(
    const ActionSchema& a, const ActionSchema& b,
    const std::function<bool(const std::map<std::string, std::string>&)>& check) {
  if (a.parameters.size() != b.parameters.size()) return false;
  std::map<std::string, std::vector<std::string>> a_groups, b_groups;
  for (const auto& p : a.parameters) a_groups[p.type].push_back(p.name);
  for (const auto& p : b.parameters) b_groups[p.type].push_back(p.name);
  if (a_groups.size() != b_groups.size()) return false;
  for (auto& [type, names] : a_groups) {
    auto it = b_groups.find(type);
    if (it == b_groups.end() || it->second.size() != names.size()) return false;
  }
  // recursive product of per-type permutations
  std::vector<std::string> types;
  for (auto& [type, names] : a_groups) types.push_back(type);
  std::map<std::string, std::string> sigma;
  std::function<bool(size_t)> rec = [&](size_t ti) -> bool {
    if (ti == types.size()) return check(sigma);
    auto& a_names = a_groups[types[ti]];
    auto b_names = b_groups[types[ti]];
    std::sort(b_names.begin(), b_names.end());
    do {
      for (size_t i = 0; i < a_names.size(); ++i) sigma[a_names[i]] = b_names[i];
      if (rec(ti + 1)) return true;
    } while (std::next_permutation(b_names.begin(), b_names.end()));
    return false;
  };
  return rec(0);
}

bool sets_equal_under(const std::vector<Literal>& a,
                      const std::vector<Literal>& b,
                      const std::map<std::string, std::string>& sigma) {
  if (a.size() != b.size()) return false;
  return rename_literals(a, sigma) == b;  // b is canonically sorted already
}

}  // namespace

ActionCanonicalForm canonical_form(const ActionSchema& a) {
  ActionCanonicalForm best;
  best.name = a.name;
  for (const auto& p : a.parameters) best.param_type_multiset.push_back(p.type);
  std::sort(best.param_type_multiset.begin(), best.param_type_multiset.end());

  // exhaustive: try every parameter ordering, rename to c0..cn, keep the
  // lexicographically smallest rendering
  std::vector<size_t> order(a.parameters.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  bool first = true;
  std::string best_key;
  do {
    std::map<std::string, std::string> sigma;
    for (size_t i = 0; i < order.size(); ++i)
      sigma[a.parameters[order[i]].name] = "c" + std::to_string(i);
    // orderings must keep the type sequence canonical: skip those that do not
    // sort types consistently with the multiset (cheap pruning is not needed
    // at this arity; correctness comes from comparing all renamings)
    auto pre = rename_literals(a.precondition, sigma);
    auto eff = rename_literals(a.effect, sigma);
    std::string key;
    for (size_t i = 0; i < order.size(); ++i)
      key += a.parameters[order[i]].type + ";";
    for (const auto& l : pre) key += render_literal(l) + "|";
    key += "/";
    for (const auto& l : eff) key += render_literal(l) + "|";
    if (first || key < best_key) {
      first = false;
      best_key = key;
      best.precondition = pre;
      best.effect = eff;
    }
  } while (std::next_permutation(order.begin(), order.end()));
  return best;
}

bool actions_equivalent(const ActionSchema& a, const ActionSchema& b) {
  if (a.parameters.size() != b.parameters.size()) return false;
  // heuristic: first-occurrence canonicalization catches most positives; the
  // per-slot type sequence rides along so the implied bijection respects types
  auto quick = [](const ActionSchema& s) {
    std::map<std::string, std::string> sigma;
    std::vector<std::string> slot_types;
    std::map<std::string, std::string> types;
    for (const auto& p : s.parameters) types[p.name] = p.type;
    int next = 0;
    auto visit = [&](const std::vector<Literal>& ls) {
      for (const auto& l : ls)
        for (const auto& t : l.atom.args)
          if (!sigma.count(t.name)) {
            sigma[t.name] = "c" + std::to_string(next++);
            slot_types.push_back(types.at(t.name));
          }
    };
    visit(s.precondition);
    visit(s.effect);
    std::vector<std::string> leftover;
    for (const auto& p : s.parameters)
      if (!sigma.count(p.name)) leftover.push_back(p.type);
    std::sort(leftover.begin(), leftover.end());
    slot_types.insert(slot_types.end(), leftover.begin(), leftover.end());
    for (const auto& p : s.parameters)
      if (!sigma.count(p.name)) sigma[p.name] = "c" + std::to_string(next++);
    return std::tuple(slot_types, rename_literals(s.precondition, sigma),
                      rename_literals(s.effect, sigma));
  };
  if (quick(a) == quick(b)) return true;
  std::vector<Literal> b_pre = b.precondition, b_eff = b.effect;
  std::sort(b_pre.begin(), b_pre.end());
  std::sort(b_eff.begin(), b_eff.end());
  return exists_bijection(a, b, [&](const std::map<std::string, std::string>& s) {
    return sets_equal_under(a.precondition, b_pre, s) &&
           sets_equal_under(a.effect, b_eff, s);
  });
}

IntrinsicScores intrinsic_score(const pddl::Domain& pred,
                                const pddl::Domain& gold) {
  IntrinsicScores scores;
  if (gold.actions.empty()) return scores;
  int eq = 0, par = 0, pre = 0, eff = 0;
  for (const auto& g : gold.actions) {
    ActionMarginals m;
    const ActionSchema* p = pred.find_action(g.name);
    if (p) {
      m.matched = true;
      std::vector<std::string> tp, tg;
      for (const auto& x : p->parameters) tp.push_back(x.type);
      for (const auto& x : g.parameters) tg.push_back(x.type);
      std::sort(tp.begin(), tp.end());
      std::sort(tg.begin(), tg.end());
      m.parameters = tp == tg;

      std::vector<Literal> g_pre = g.precondition, g_eff = g.effect;
      std::sort(g_pre.begin(), g_pre.end());
      std::sort(g_eff.begin(), g_eff.end());
      m.precondition = exists_bijection(
          *p, g, [&](const std::map<std::string, std::string>& s) {
            return sets_equal_under(p->precondition, g_pre, s);
          });
      m.effect = exists_bijection(
          *p, g, [&](const std::map<std::string, std::string>& s) {
            return sets_equal_under(p->effect, g_eff, s);
          });
      m.equivalent = actions_equivalent(*p, g);
    }
    eq += m.equivalent;
    par += m.parameters;
    pre += m.precondition;
    eff += m.effect;
    scores.per_action[g.name] = m;
  }
  double n = (double)gold.actions.size();
  scores.action_accuracy = eq / n;
  scores.parameter = par / n;
  scores.precondition = pre / n;
  scores.effect = eff / n;
  for (const auto& a : pred.actions)
    if (!gold.find_action(a.name)) scores.unmatched_predicted.push_back(a.name);
  return scores;
}

namespace {

std::string canonical_plan_text(const std::string& text) {
  std::string out;
  for (const auto& step : planner::parse_plan(text)) {
    out += "(" + step.schema;
    for (const auto& a : step.args) out += " " + a;
    out += ")\n";
  }
  return out;
}

// for unsolved PFs with a gold domain: name the first action whose
// definition differs from gold (a hint for the human review columns)
std::string first_differing_action(const pddl::Domain& pred,
                                   const pddl::Domain& gold) {
  for (const auto& g : gold.actions) {
    const ActionSchema* p = pred.find_action(g.name);
    if (!p) return g.name + " (missing)";
    if (!actions_equivalent(*p, g)) return g.name;
  }
  return "";
}

}  // namespace

ExtrinsicReport extrinsic_score(const pddl::Domain& pred,
                                const std::vector<NamedProblem>& pfs,
                                const std::map<std::string, std::string>& gold_plans,
                                const pddl::Domain* gold,
                                const planner::SearchLimits& lim,
                                bool strict_domain_name) {
  ExtrinsicReport report;
  int solved = 0, exact = 0, with_gold = 0;
  for (const auto& npf : pfs) {
    PfOutcome out;
    out.name = npf.name;
    pddl::Problem problem;
    bool parsed = false;
    try {
      problem = pddl::parse_problem(npf.text, pred);
      parsed = true;
      if (problem.domain_name != pred.name) {
        if (strict_domain_name) {
          parsed = false;
          out.kind = PfOutcome::Kind::solver_error;
          out.detail = "problem names domain '" + problem.domain_name +
                       "', predicted domain is '" + pred.name + "'";
          out.category = "Syntax Error";
        } else {
          out.detail = "domain-name mismatch tolerated ('" +
                       problem.domain_name + "' vs '" + pred.name + "')";
        }
      }
    } catch (const pddl::ParseError& e) {
      out.kind = PfOutcome::Kind::solver_error;
      out.detail = e.what();
      out.category = "Syntax Error";
    }
    if (parsed) {
      planner::PlanResult r = planner::solve(pred, problem, lim);
      switch (r.status) {
        case planner::PlanResult::Status::plan: {
          out.kind = PfOutcome::Kind::solved;
          ++solved;
          out.plan_text = planner::render_plan(r.steps);
          auto it = gold_plans.find(npf.name);
          if (it != gold_plans.end()) {
            ++with_gold;
            out.exact_match =
                canonical_plan_text(out.plan_text) ==
                canonical_plan_text(it->second);
            exact += out.exact_match;
          }
          if (gold) {
            try {
              pddl::Problem on_gold = pddl::parse_problem(npf.text, *gold);
              std::vector<planner::PlanStep> steps;
              for (const auto& s : r.steps) steps.push_back({s.schema, s.args});
              out.valid_on_gold =
                  planner::validate_plan(*gold, on_gold, steps).accepted;
            } catch (const std::exception&) {
              out.valid_on_gold = false;
            }
          }
          out.category = out.exact_match ? "Good Plan"
                                         : "Bad Plan / Good Plan (needs review)";
          break;
        }
        case planner::PlanResult::Status::no_solution:
        case planner::PlanResult::Status::timeout: {
          out.kind = r.status == planner::PlanResult::Status::no_solution
                         ? PfOutcome::Kind::no_plan
                         : PfOutcome::Kind::timeout;
          out.category = "Bad Action / Good Action (needs review)";
          if (gold) {
            std::string diff = first_differing_action(pred, *gold);
            if (!diff.empty()) out.detail = "first differing action: " + diff;
          }
          break;
        }
        case planner::PlanResult::Status::format_error: {
          out.kind = PfOutcome::Kind::solver_error;
          out.detail = r.detail;
          out.category = "Syntax Error";
          break;
        }
      }
    }
    report.outcomes.push_back(std::move(out));
  }
  report.solve_rate = pfs.empty() ? 0.0 : (double)solved / pfs.size();
  report.exact_rate = with_gold == 0 ? 0.0 : (double)exact / with_gold;
  return report;
}

}  // namespace planlab::acteval
