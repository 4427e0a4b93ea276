// Bundled domain files (embedded; assets/domains mirrors them) and the
// gold problem-file export of a full oracle-view world.
#include "planlab/envs.hpp"
#include "planlab/pddl.hpp"

namespace planlab::envs {

namespace {

const char* kCoinDomain = R"((define (domain coin)
  (:requirements :strips :typing :negative-preconditions)
  (:types agent room direction)
  (:predicates
    (at ?a - agent ?r - room)
    (connected ?r1 - room ?r2 - room ?d - direction)
    (door-closed ?r1 - room ?r2 - room)
    (visited ?r - room)
    (coin-at ?r - room)
    (has-coin ?a - agent))
  (:action move
    :parameters (?a - agent ?from - room ?to - room ?d - direction)
    :precondition (and
      (at ?a ?from)
      (connected ?from ?to ?d)
      (not (door-closed ?from ?to)))
    :effect (and
      (not (at ?a ?from))
      (at ?a ?to)
      (visited ?to)))
  (:action open-door
    :parameters (?a - agent ?from - room ?to - room ?d - direction)
    :precondition (and
      (at ?a ?from)
      (connected ?from ?to ?d)
      (door-closed ?from ?to))
    :effect (and
      (not (door-closed ?from ?to))
      (not (door-closed ?to ?from))))
  (:action take-coin
    :parameters (?a - agent ?r - room)
    :precondition (and (at ?a ?r) (coin-at ?r))
    :effect (and (not (coin-at ?r)) (has-coin ?a))))
)";

const char* kCookingDomain = R"((define (domain cooking)
  (:requirements :strips :typing :negative-preconditions)
  (:types agent room direction thing)
  (:predicates
    (at ?a - agent ?r - room)
    (connected ?r1 - room ?r2 - room ?d - direction)
    (door-closed ?r1 - room ?r2 - room)
    (visited ?r - room)
    (is-kitchen ?r - room)
    (in-room ?t - thing ?r - room)
    (carrying ?a - agent ?t - thing)
    (is-knife ?t - thing)
    (is-stove ?t - thing)
    (is-oven ?t - thing)
    (is-barbeque ?t - thing)
    (uncut ?t - thing)
    (sliced ?t - thing)
    (diced ?t - thing)
    (chopped ?t - thing)
    (uncooked ?t - thing)
    (fried ?t - thing)
    (roasted ?t - thing)
    (grilled ?t - thing)
    (has-meal ?a - agent)
    (meal-eaten))
  (:action move
    :parameters (?a - agent ?from - room ?to - room ?d - direction)
    :precondition (and
      (at ?a ?from)
      (connected ?from ?to ?d)
      (not (door-closed ?from ?to)))
    :effect (and
      (not (at ?a ?from))
      (at ?a ?to)
      (visited ?to)))
  (:action open-door
    :parameters (?a - agent ?from - room ?to - room ?d - direction)
    :precondition (and
      (at ?a ?from)
      (connected ?from ?to ?d)
      (door-closed ?from ?to))
    :effect (and
      (not (door-closed ?from ?to))
      (not (door-closed ?to ?from))))
  (:action take
    :parameters (?a - agent ?t - thing ?r - room)
    :precondition (and (at ?a ?r) (in-room ?t ?r))
    :effect (and (not (in-room ?t ?r)) (carrying ?a ?t)))
  (:action slice
    :parameters (?a - agent ?t - thing ?k - thing)
    :precondition (and (carrying ?a ?t) (carrying ?a ?k) (is-knife ?k) (uncut ?t))
    :effect (and (not (uncut ?t)) (sliced ?t)))
  (:action dice
    :parameters (?a - agent ?t - thing ?k - thing)
    :precondition (and (carrying ?a ?t) (carrying ?a ?k) (is-knife ?k) (uncut ?t))
    :effect (and (not (uncut ?t)) (diced ?t)))
  (:action chop
    :parameters (?a - agent ?t - thing ?k - thing)
    :precondition (and (carrying ?a ?t) (carrying ?a ?k) (is-knife ?k) (uncut ?t))
    :effect (and (not (uncut ?t)) (chopped ?t)))
  (:action fry
    :parameters (?a - agent ?t - thing ?s - thing ?r - room)
    :precondition (and
      (at ?a ?r)
      (in-room ?s ?r)
      (is-stove ?s)
      (carrying ?a ?t)
      (uncooked ?t)
      (not (uncut ?t)))
    :effect (and (not (uncooked ?t)) (fried ?t)))
  (:action roast
    :parameters (?a - agent ?t - thing ?s - thing ?r - room)
    :precondition (and
      (at ?a ?r)
      (in-room ?s ?r)
      (is-oven ?s)
      (carrying ?a ?t)
      (uncooked ?t)
      (not (uncut ?t)))
    :effect (and (not (uncooked ?t)) (roasted ?t)))
  (:action grill
    :parameters (?a - agent ?t - thing ?s - thing ?r - room)
    :precondition (and
      (at ?a ?r)
      (in-room ?s ?r)
      (is-barbeque ?s)
      (carrying ?a ?t)
      (uncooked ?t)
      (not (uncut ?t)))
    :effect (and (not (uncooked ?t)) (grilled ?t)))
  (:action prepare-meal
    :parameters (?a - agent ?r - room)
    :precondition (and (at ?a ?r) (is-kitchen ?r))
    :effect (has-meal ?a))
  (:action eat-meal
    :parameters (?a - agent)
    :precondition (has-meal ?a)
    :effect (meal-eaten)))
)";

}  // namespace

const std::string& coin_domain_text() {
  static const std::string text = kCoinDomain;
  return text;
}

const std::string& cooking_domain_text() {
  static const std::string text = kCookingDomain;
  return text;
}

const std::string& domain_text(Kind k) {
  return k == Kind::coin ? coin_domain_text() : cooking_domain_text();
}

std::string export_problem(const WorldState& w) {
  using pddl::Problem;
  using pddl::Term;
  Problem p;
  bool coin = w.cfg.kind == Kind::coin;
  p.name = coin ? "coin-world" : "cooking-world";
  p.domain_name = coin ? "coin" : "cooking";

  p.objects.push_back({"agent", "agent"});
  for (const char* d : {"north", "east", "south", "west"})
    p.objects.push_back({d, "direction"});
  for (const auto& r : w.rooms) p.objects.push_back({r.name, "room"});

  auto atom = [&](const std::string& pred, std::vector<std::string> args) {
    p.init.push_back(pddl::make_atom(pred, args));
  };

  atom("at", {"agent", w.rooms[w.agent_room].name});
  atom("visited", {w.rooms[w.agent_room].name});
  for (const auto& r : w.rooms)
    for (int di = 0; di < 4; ++di) {
      if (!r.exits[di]) continue;
      const Exit& ex = *r.exits[di];
      atom("connected",
           {r.name, w.rooms[ex.to].name, dir_name(static_cast<Dir>(di))});
      if (ex.door >= 0 && !w.doors[ex.door].open)
        atom("door-closed", {r.name, w.rooms[ex.to].name});
    }

  if (coin) {
    for (const auto& it : w.items)
      if (it.kind == ItemKind::coin) {
        if (it.loc.where == ItemLocation::Where::held)
          atom("has-coin", {"agent"});
        else
          atom("coin-at", {w.rooms[it.loc.room].name});
      }
    p.goal.push_back({true, pddl::make_atom("has-coin", {"agent"})});
    pddl::normalize(p);
    return render(p);
  }

  atom("is-kitchen", {w.rooms[w.kitchen].name});
  for (const auto& it : w.items) {
    if (it.kind == ItemKind::cookbook || it.kind == ItemKind::meal) continue;
    std::string obj = spaces_to_dashes(it.name);
    p.objects.push_back({obj, "thing"});
    if (it.loc.where == ItemLocation::Where::held)
      atom("carrying", {"agent", obj});
    else
      atom("in-room", {obj, w.rooms[it.loc.room].name});
    if (it.kind == ItemKind::knife) {
      atom("is-knife", {obj});
      continue;
    }
    switch (it.cut) {
      case CutState::none: atom("uncut", {obj}); break;
      case CutState::sliced: atom("sliced", {obj}); break;
      case CutState::diced: atom("diced", {obj}); break;
      case CutState::chopped: atom("chopped", {obj}); break;
    }
    switch (it.cook) {
      case CookState::none: atom("uncooked", {obj}); break;
      case CookState::fried: atom("fried", {obj}); break;
      case CookState::roasted: atom("roasted", {obj}); break;
      case CookState::grilled: atom("grilled", {obj}); break;
    }
  }
  for (const auto& r : w.rooms)
    for (const auto& f : r.furniture)
      if (f.kind == FurnitureKind::appliance) {
        std::string obj = spaces_to_dashes(f.name);
        p.objects.push_back({obj, "thing"});
        atom("in-room", {obj, r.name});
        if (f.name == "stove") atom("is-stove", {obj});
        if (f.name == "oven") atom("is-oven", {obj});
        if (f.name == "barbeque") atom("is-barbeque", {obj});
      }

  if (w.find_item("meal")) atom("has-meal", {"agent"});

  auto goal_atom = [&](const std::string& pred, std::vector<std::string> args) {
    p.goal.push_back({true, pddl::make_atom(pred, args)});
  };
  for (const auto& e : w.recipe.entries) {
    if (!w.find_item(e.ingredient)) continue;  // consumed by prepare-meal
    std::string obj = spaces_to_dashes(e.ingredient);
    goal_atom("carrying", {"agent", obj});
    if (e.cut_req != CutState::none) goal_atom(cut_name(e.cut_req), {obj});
    if (e.cook_req != CookState::none) goal_atom(cook_name(e.cook_req), {obj});
  }
  goal_atom("meal-eaten", {});
  pddl::normalize(p);
  return render(p);
}

}  // namespace planlab::envs
