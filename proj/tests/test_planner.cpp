#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <functional>
#include <sstream>

#include "brute_oracle.hpp"
#include "planlab/planner.hpp"

using namespace planlab;
using namespace planlab::pddl;
using namespace planlab::planner;

namespace {

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path fixture(const std::string& rel) {
  return std::filesystem::path(PLANLAB_ASSETS_DIR) / "fixtures" / rel;
}

Domain load_domain(const std::string& rel) {
  return parse_domain(read_file(fixture(rel)));
}

Problem load_problem(const std::string& rel, const Domain& d) {
  return parse_problem(read_file(fixture(rel)), d);
}

}  // namespace

TEST_CASE("grounding the pick-lock schema: 1 lock, 1 door, 2 rooms") {
  Domain d = load_domain("gold/escape/domain.pddl");
  Problem p = load_problem("gold/escape/p01.pddl", d);
  auto actions = ground(d, p);
  // 1 * 1 * 2 * 2 instantiations, enumerated by hand
  CHECK(actions.size() == 4);
  std::set<std::string> labels;
  for (const auto& a : actions) labels.insert(a.label);
  CHECK(labels.count("(pick-lock l1 d1 cell hallway)") == 1);
  CHECK(labels.count("(pick-lock l1 d1 hallway cell)") == 1);
  CHECK(labels.count("(pick-lock l1 d1 cell cell)") == 1);
  CHECK(labels.count("(pick-lock l1 d1 hallway hallway)") == 1);
}

TEST_CASE("zero-parameter action grounds to exactly one instance") {
  Domain d = load_domain("misc/toggle.pddl");
  Problem p = load_problem("misc/toggle-p1.pddl", d);
  auto actions = ground(d, p);
  CHECK(actions.size() == 2);  // flip-on, flip-off
  CHECK(actions[0].args.empty());
}

TEST_CASE("missing objects of a parameter type yield an empty product") {
  Domain d = load_domain("gold/treasure/domain.pddl");
  Problem p = parse_problem(
      "(define (problem bare) (:domain treasure) "
      "(:objects p1 - player meadow - room) "
      "(:init (at p1 meadow)) (:goal (at p1 meadow)))",
      d);
  auto actions = ground(d, p);
  for (const auto& a : actions) CHECK(a.schema != "get");  // no items
  CHECK(actions.size() == 1);  // only (go p1 meadow meadow)
}

TEST_CASE("apply: pick-lock transition") {
  Domain d = load_domain("gold/escape/domain.pddl");
  Problem p = load_problem("gold/escape/p01.pddl", d);
  auto actions = ground(d, p);
  const GroundAction* pick = nullptr;
  for (const auto& a : actions)
    if (a.label == "(pick-lock l1 d1 cell hallway)") pick = &a;
  REQUIRE(pick);
  State s = initial_state(p);
  State next = planlab::planner::apply(s, *pick);
  CHECK_FALSE(holds(next, make_atom("locked", {"d1"})));
  CHECK(holds(next, make_atom("picked", {"l1"})));
  CHECK(holds(next, make_atom("accessible", {"cell", "hallway"})));
}

TEST_CASE("apply: empty effect leaves the state identical") {
  Domain d = parse_domain(
      "(define (domain idle) (:predicates (p)) "
      "(:action wait :parameters () :precondition (p) :effect (and)))");
  Problem p = parse_problem(
      "(define (problem i) (:domain idle) (:objects) (:init (p)) (:goal (p)))",
      d);
  auto actions = ground(d, p);
  REQUIRE(actions.size() == 1);
  State s = initial_state(p);
  CHECK(planlab::planner::apply(s, actions[0]) == s);
}

TEST_CASE("apply: inapplicable action names the violated atom") {
  Domain d = load_domain("gold/treasure/domain.pddl");
  Problem p = load_problem("gold/treasure/p01.pddl", d);
  auto actions = ground(d, p);
  const GroundAction* get = nullptr;
  for (const auto& a : actions)
    if (a.label == "(get p1 gold cave)") get = &a;
  REQUIRE(get);
  State s = initial_state(p);  // p1 is in the meadow, not the cave
  try {
    planlab::planner::apply(s, *get);
    FAIL("expected NotApplicable");
  } catch (const PlanError& e) {
    CHECK(e.kind == PlanError::Kind::not_applicable);
    CHECK(std::string(e.what()).find("(at p1 cave)") != std::string::npos);
  }
}

TEST_CASE("solve: goal already satisfied -> empty plan") {
  Domain d = load_domain("misc/hall.pddl");
  Problem p = parse_problem(
      "(define (problem here) (:domain hall) "
      "(:objects agent - agent kitchen - room) "
      "(:init (at agent kitchen)) (:goal (at agent kitchen)))",
      d);
  PlanResult r = solve(d, p);
  REQUIRE(r.status == PlanResult::Status::plan);
  CHECK(r.steps.empty());
}

TEST_CASE("solve: co-location domain needs go before get; cheat omits go") {
  Domain d = load_domain("gold/treasure/domain.pddl");
  Problem p = load_problem("gold/treasure/p01.pddl", d);

  PlanResult r = solve(d, p);
  REQUIRE(r.status == PlanResult::Status::plan);
  REQUIRE(r.steps.size() == 2);
  CHECK(r.steps[0].schema == "go");
  CHECK(r.steps[1].schema == "get");

  // "Cheating" domain: drop the co-location precondition from get.
  Domain cheat = d;
  for (auto& a : cheat.actions)
    if (a.name == "get") {
      std::erase_if(a.precondition,
                    [](const Literal& l) { return l.atom.pred == "at"; });
    }
  PlanResult r2 = solve(cheat, p);
  REQUIRE(r2.status == PlanResult::Status::plan);
  REQUIRE(r2.steps.size() == 1);
  CHECK(r2.steps[0].schema == "get");
}

TEST_CASE("solve matches the brute-force oracle on every gold fixture") {
  struct Case {
    const char* dom;
    const char* prob;
  };
  const Case cases[] = {
      {"gold/treasure/domain.pddl", "gold/treasure/p01.pddl"},
      {"gold/treasure/domain.pddl", "gold/treasure/p02.pddl"},
      {"gold/blocks/domain.pddl", "gold/blocks/p01.pddl"},
      {"gold/blocks/domain.pddl", "gold/blocks/p02.pddl"},
      {"gold/rainwater/domain.pddl", "gold/rainwater/p01.pddl"},
      {"gold/rainwater/domain.pddl", "gold/rainwater/p02.pddl"},
      {"gold/gripper/domain.pddl", "gold/gripper/p01.pddl"},
      {"gold/gripper/domain.pddl", "gold/gripper/p02.pddl"},
      {"gold/escape/domain.pddl", "gold/escape/p01.pddl"},
      {"gold/escape/domain.pddl", "gold/escape/p02.pddl"},
  };
  for (const auto& c : cases) {
    INFO(c.prob);
    Domain d = load_domain(c.dom);
    Problem p = load_problem(c.prob, d);
    PlanResult r = solve(d, p);
    REQUIRE(r.status == PlanResult::Status::plan);
    int expect = testing::brute_min_plan(d, p, 8);
    REQUIRE(expect >= 0);
    CHECK((int)r.steps.size() == expect);
    // soundness: every returned plan passes validate_plan
    std::vector<PlanStep> steps;
    for (const auto& s : r.steps) steps.push_back({s.schema, s.args});
    CHECK(validate_plan(d, p, steps).accepted);
  }
}

TEST_CASE("solve is deterministic and timeout-monotone") {
  Domain d = load_domain("gold/gripper/domain.pddl");
  Problem p = load_problem("gold/gripper/p02.pddl", d);
  PlanResult a = solve(d, p, {5.0, 1000000});
  PlanResult b = solve(d, p, {5.0, 1000000});
  REQUIRE(a.status == PlanResult::Status::plan);
  CHECK(render_plan(a.steps) == render_plan(b.steps));
  PlanResult c = solve(d, p, {50.0, 1000000});  // larger cap, same plan
  CHECK(render_plan(a.steps) == render_plan(c.steps));
}

TEST_CASE("failure taxonomy: no solution") {
  Domain d = load_domain("gold/blocks/domain.pddl");
  Problem p = parse_problem(
      "(define (problem self) (:domain blocks) (:objects a - block) "
      "(:init (on-table a) (clear a) (arm-empty)) (:goal (on a a)))",
      d);
  PlanResult r = solve(d, p);
  CHECK(r.status == PlanResult::Status::no_solution);
}

TEST_CASE("failure taxonomy: timeout via expansion cap and via clock") {
  Domain d = load_domain("gold/gripper/domain.pddl");
  Problem p = parse_problem(
      "(define (problem big) (:domain gripper) "
      "(:objects r1 r2 r3 r4 - room b1 b2 b3 b4 b5 - ball g1 g2 - gripper) "
      "(:init (at-robby r1) (at b1 r1) (at b2 r1) (at b3 r2) (at b4 r2) "
      "(at b5 r3) (free g1) (free g2)) "
      "(:goal (and (at b1 r4) (at b2 r4) (at b3 r4) (at b4 r4) (at b5 r4))))",
      d);
  SUBCASE("expansion cap") {
    PlanResult r = solve(d, p, {30.0, 50});
    CHECK(r.status == PlanResult::Status::timeout);
  }
  SUBCASE("wall clock cap") {
    PlanResult r = solve(d, p, {0.0, 100000000});
    CHECK(r.status == PlanResult::Status::timeout);
  }
}

TEST_CASE("failure taxonomy: format error") {
  Domain d = load_domain("gold/blocks/domain.pddl");
  // Problem refers to a predicate the domain does not declare.
  Problem p = parse_problem(
      "(define (problem odd) (:domain blocks) (:objects a - block) "
      "(:init (levitating a)) (:goal (on-table a)))");
  PlanResult r = solve(d, p);
  CHECK(r.status == PlanResult::Status::format_error);
  CHECK(!r.detail.empty());
}

TEST_CASE("validate_plan accepts the solver's own plan") {
  Domain d = load_domain("gold/treasure/domain.pddl");
  Problem p = load_problem("gold/treasure/p02.pddl", d);
  PlanResult r = solve(d, p);
  REQUIRE(r.status == PlanResult::Status::plan);
  std::vector<PlanStep> steps;
  for (const auto& s : r.steps) steps.push_back({s.schema, s.args});
  ValidationReport rep = validate_plan(d, p, steps);
  CHECK(rep.accepted);
}

TEST_CASE("validate_plan rejects a swapped pair at the right step") {
  Domain d = load_domain("gold/treasure/domain.pddl");
  Problem p = load_problem("gold/treasure/p02.pddl", d);
  // gold plan: go meadow->cave, go cave->grotto, get amulet
  std::vector<PlanStep> steps = {
      {"go", {"p1", "meadow", "cave"}},
      {"get", {"p1", "amulet", "grotto"}},  // swapped: needs the second go
      {"go", {"p1", "cave", "grotto"}},
  };
  ValidationReport rep = validate_plan(d, p, steps);
  CHECK_FALSE(rep.accepted);
  CHECK(rep.failing_step == 1);
  CHECK(rep.diagnostic.find("(at p1 grotto)") != std::string::npos);
}

TEST_CASE("validate_plan: empty plan on unsatisfied goal reports the literal") {
  Domain d = load_domain("gold/treasure/domain.pddl");
  Problem p = load_problem("gold/treasure/p01.pddl", d);
  ValidationReport rep = validate_plan(d, p, {});
  CHECK_FALSE(rep.accepted);
  CHECK(rep.failing_step == -1);
  CHECK(rep.diagnostic.find("(inventory p1 gold)") != std::string::npos);
}

TEST_CASE("validate_plan: unknown action and unknown object") {
  Domain d = load_domain("gold/treasure/domain.pddl");
  Problem p = load_problem("gold/treasure/p01.pddl", d);
  try {
    validate_plan(d, p, {{"teleport", {"p1"}}});
    FAIL("expected throw");
  } catch (const PlanError& e) {
    CHECK(e.kind == PlanError::Kind::unknown_action);
  }
  try {
    validate_plan(d, p, {{"go", {"p1", "meadow", "atlantis"}}});
    FAIL("expected throw");
  } catch (const PlanError& e) {
    CHECK(e.kind == PlanError::Kind::unknown_object);
  }
}

TEST_CASE("parse_plan reads one action per line with comments") {
  auto steps = parse_plan("; a plan\n(go p1 meadow cave)\n\n(get p1 gold cave) ; grab\n");
  REQUIRE(steps.size() == 2);
  CHECK(steps[0].schema == "go");
  CHECK(steps[1].args == std::vector<std::string>{"p1", "gold", "cave"});
}
