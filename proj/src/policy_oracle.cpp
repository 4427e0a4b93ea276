// Ground-truth oracle policy. All outputs derive from the ideal problem file
// for the currently observed knowledge, so PDDL-gen and PDDL-edit stay in
// lockstep by construction.
#include <algorithm>
#include <deque>
#include <map>

#include "planlab/policy.hpp"

namespace planlab::policy {

using envs::Dir;
using envs::GroundTruth;
using pddl::Atom;
using pddl::Literal;
using pddl::Problem;

void OraclePolicy::begin_episode(const envs::WorldState* world, uint64_t seed) {
  (void)seed;
  if (!world)
    throw PolicyError("oracle policy requires a simulated environment");
  world_ = world;
  visited_.clear();
  visited_.insert(world->rooms[world->start_room].name);
  recipe_known_ = false;
}

namespace {

std::string placeholder_name(const std::string& room, Dir d) {
  return "unk-" + room + "-" + envs::dir_name(d);
}

void add_atom(Problem& p, const std::string& pred,
              const std::vector<std::string>& args) {
  p.init.push_back(pddl::make_atom(pred, args));
}

}  // namespace

pddl::Problem OraclePolicy::ideal_problem() const {
  GroundTruth gt = envs::oracle_view(*world_);
  bool coin = world_->cfg.kind == envs::Kind::coin;

  Problem p;
  p.name = "episode";
  p.domain_name = coin ? "coin" : "cooking";
  p.objects.push_back({"agent", "agent"});
  for (const char* d : {"north", "east", "south", "west"})
    p.objects.push_back({d, "direction"});

  std::set<std::string> rooms_declared;
  auto declare_room = [&](const std::string& name) {
    if (rooms_declared.insert(name).second) p.objects.push_back({name, "room"});
  };

  std::map<std::string, const envs::GtRoom*> by_name;
  for (const auto& r : gt.rooms) by_name[r.name] = &r;

  for (const auto& name : visited_) {
    declare_room(name);
    add_atom(p, "visited", {name});
    for (const auto& e : by_name.at(name)->exits) {
      std::string d = envs::dir_name(e.dir);
      std::string back = envs::dir_name(envs::opposite(e.dir));
      if (e.has_door && !e.door_open) {
        // unexplored closed door: the far side is unknown
        std::string ph = placeholder_name(name, e.dir);
        declare_room(ph);
        add_atom(p, "connected", {name, ph, d});
        add_atom(p, "connected", {ph, name, back});
        add_atom(p, "door-closed", {name, ph});
        add_atom(p, "door-closed", {ph, name});
      } else {
        // open passage or opened door: the neighbour's name was observed
        declare_room(e.to);
        add_atom(p, "connected", {name, e.to, d});
        add_atom(p, "connected", {e.to, name, back});
      }
    }
  }
  add_atom(p, "at", {"agent", gt.agent_room});

  if (coin) {
    for (const auto& it : gt.items) {
      if (it.kind != envs::ItemKind::coin) continue;
      if (it.held)
        add_atom(p, "has-coin", {"agent"});
      else if (visited_.count(it.room))
        add_atom(p, "coin-at", {it.room});
    }
    p.goal.push_back({true, pddl::make_atom("has-coin", {"agent"})});
    pddl::normalize(p);
    return p;
  }

  if (!gt.kitchen.empty() && visited_.count(gt.kitchen))
    add_atom(p, "is-kitchen", {gt.kitchen});
  auto declare_thing = [&](const std::string& obj) {
    p.objects.push_back({obj, "thing"});
  };
  for (const auto& it : gt.items) {
    if (it.kind != envs::ItemKind::ingredient && it.kind != envs::ItemKind::knife)
      continue;
    bool revealed = it.held || (visited_.count(it.room) && !it.hidden);
    if (!revealed) continue;
    std::string obj = spaces_to_dashes(it.name);
    declare_thing(obj);
    if (it.held)
      add_atom(p, "carrying", {"agent", obj});
    else
      add_atom(p, "in-room", {obj, it.room});
    if (it.kind == envs::ItemKind::knife) {
      add_atom(p, "is-knife", {obj});
      continue;
    }
    switch (it.cut) {
      case envs::CutState::none: add_atom(p, "uncut", {obj}); break;
      default: add_atom(p, envs::cut_name(it.cut), {obj}); break;
    }
    switch (it.cook) {
      case envs::CookState::none: add_atom(p, "uncooked", {obj}); break;
      default: add_atom(p, envs::cook_name(it.cook), {obj}); break;
    }
  }
  for (const auto& r : gt.rooms) {
    if (!visited_.count(r.name)) continue;
    for (const auto& f : r.furniture) {
      if (f.kind != envs::FurnitureKind::appliance) continue;
      std::string obj = spaces_to_dashes(f.name);
      declare_thing(obj);
      add_atom(p, "in-room", {obj, r.name});
      if (f.name == "stove") add_atom(p, "is-stove", {obj});
      if (f.name == "oven") add_atom(p, "is-oven", {obj});
      if (f.name == "barbeque") add_atom(p, "is-barbeque", {obj});
    }
  }
  for (const auto& it : gt.items)
    if (it.kind == envs::ItemKind::meal && it.held)
      add_atom(p, "has-meal", {"agent"});
  p.goal.push_back({true, pddl::make_atom("meal-eaten", {})});
  pddl::normalize(p);
  return p;
}

PolicyOutput OraclePolicy::propose(const PromptContext& ctx) {
  if (!world_) throw PolicyError("oracle: begin_episode was not called");
  // The agent integrates after every step, so the oracle is always standing
  // in the most recently observed room.
  visited_.insert(world_->rooms[world_->agent_room].name);
  for (const auto& o : ctx.observations)
    if (!recipe_known_ &&
        o.find("Gather all following ingredients") != std::string::npos)
      recipe_known_ = true;

  PolicyOutput out;
  if (ctx.strategy == Strategy::action_gen) {
    out.type = PolicyOutput::Type::action;
    out.text = propose_action(ctx);
    out.transcript = "oracle action: " + out.text;
    return out;
  }

  Problem ideal = ideal_problem();
  if (ctx.strategy == Strategy::pddl_gen) {
    out.type = PolicyOutput::Type::full_problem;
    out.text = render(ideal);
    out.transcript = "oracle pddl-gen";
    return out;
  }

  // pddl-edit: exact diff current -> ideal
  Problem cur = pddl::parse_problem(ctx.problem_text);
  agent::EditScript script;
  std::set<std::string> cur_objects, ideal_objects;
  for (const auto& o : cur.objects) cur_objects.insert(o.name);
  for (const auto& o : ideal.objects) ideal_objects.insert(o.name);

  std::vector<Atom> added, deleted;
  for (const auto& a : ideal.init)
    if (!std::binary_search(cur.init.begin(), cur.init.end(), a))
      added.push_back(a);
  for (const auto& a : cur.init)
    if (!std::binary_search(ideal.init.begin(), ideal.init.end(), a))
      deleted.push_back(a);

  for (const auto& o : ideal.objects)
    if (!cur_objects.count(o.name)) {
      agent::EditOp op;
      op.kind = agent::EditOp::Kind::add_object;
      op.name = o.name;
      op.type = o.type;
      script.push_back(op);
    }

  // Pair placeholder-resolving deletions with their additions as replaces:
  // (connected x unk-x-d d) -> (connected x y d) identifies unk-x-d = y.
  std::map<std::string, std::string> resolved;  // placeholder -> real room
  for (const auto& del : deleted) {
    if (del.pred != "connected") continue;
    for (const auto& add : added) {
      if (add.pred != "connected" || add.args.size() != del.args.size())
        continue;
      if (add.args[0] == del.args[0] && add.args[2] == del.args[2] &&
          del.args[1].name.rfind("unk-", 0) == 0 &&
          !ideal_objects.count(del.args[1].name))
        resolved[del.args[1].name] = add.args[1].name;
    }
  }
  auto substitute = [&](const Atom& a) {
    Atom out_atom = a;
    for (auto& t : out_atom.args) {
      auto it = resolved.find(t.name);
      if (it != resolved.end()) t.name = it->second;
    }
    return out_atom;
  };
  std::set<std::string> consumed_adds, consumed_dels;
  for (const auto& del : deleted) {
    bool mentions_resolved = false;
    for (const auto& t : del.args) mentions_resolved |= resolved.count(t.name) > 0;
    if (!mentions_resolved) continue;
    Atom repl = substitute(del);
    if (std::binary_search(ideal.init.begin(), ideal.init.end(), repl) &&
        std::count(added.begin(), added.end(), repl) &&
        !consumed_adds.count(render_atom(repl))) {
      agent::EditOp op;
      op.kind = agent::EditOp::Kind::replace_fact;
      op.fact = del;
      op.replacement = repl;
      script.push_back(op);
      consumed_adds.insert(render_atom(repl));
      consumed_dels.insert(render_atom(del));
    }
  }

  for (const auto& a : added)
    if (!consumed_adds.count(render_atom(a))) {
      agent::EditOp op;
      op.kind = agent::EditOp::Kind::add_fact;
      op.fact = a;
      script.push_back(op);
    }
  for (const auto& a : deleted)
    if (!consumed_dels.count(render_atom(a))) {
      agent::EditOp op;
      op.kind = agent::EditOp::Kind::delete_fact;
      op.fact = a;
      script.push_back(op);
    }
  for (const auto& name : cur_objects)
    if (!ideal_objects.count(name)) {
      agent::EditOp op;
      op.kind = agent::EditOp::Kind::delete_object;
      op.name = name;
      script.push_back(op);
    }

  out.type = PolicyOutput::Type::edit_script;
  out.text = render_edit_script(script);
  out.transcript = "oracle pddl-edit";
  return out;
}

// ------------------------------------------------------- action-gen oracle --

namespace {

struct Routing {
  std::string first_action;  // "move d" or "open door to d"
  int distance = -1;
};

// First env action along a shortest path to `target` through visited rooms
// (the target itself may be a frontier room or placeholder side).
Routing route_first_action(const GroundTruth& gt,
                           const std::set<std::string>& visited,
                           const std::string& from, const std::string& target) {
  std::map<std::string, const envs::GtRoom*> by_name;
  for (const auto& r : gt.rooms) by_name[r.name] = &r;
  std::deque<std::pair<std::string, int>> q{{from, 0}};
  std::map<std::string, std::pair<std::string, const envs::GtExit*>> parent;
  std::set<std::string> seen{from};
  while (!q.empty()) {
    auto [cur, dist] = q.front();
    q.pop_front();
    if (cur == target) {
      // walk back to the first hop
      std::string node = cur;
      const envs::GtExit* first = nullptr;
      while (node != from) {
        auto [prev, ex] = parent.at(node);
        first = ex;
        node = prev;
      }
      Routing r;
      r.distance = dist;
      if (first->has_door && !first->door_open)
        r.first_action = "open door to " + std::string(envs::dir_name(first->dir));
      else
        r.first_action = "move " + std::string(envs::dir_name(first->dir));
      return r;
    }
    if (!visited.count(cur)) continue;  // only traverse through known rooms
    for (const auto& e : by_name.at(cur)->exits)
      if (seen.insert(e.to).second) {
        parent[e.to] = {cur, &e};
        q.push_back({e.to, dist + 1});
      }
  }
  return {};
}

}  // namespace

std::string OraclePolicy::propose_action(const PromptContext& ctx) {
  (void)ctx;
  GroundTruth gt = envs::oracle_view(*world_);
  const std::string& here = gt.agent_room;
  bool coin = world_->cfg.kind == envs::Kind::coin;

  auto nearest_frontier = [&]() -> std::string {
    // nearest room that is reachable through visited rooms but not visited
    Routing best;
    std::string best_target;
    for (const auto& r : gt.rooms) {
      if (visited_.count(r.name)) continue;
      // reachable = some visited neighbour with an open exit toward it
      Routing route = route_first_action(gt, visited_, here, r.name);
      if (route.distance < 0) continue;
      if (best.distance < 0 || route.distance < best.distance ||
          (route.distance == best.distance && r.name < best_target)) {
        best = route;
        best_target = r.name;
      }
    }
    return best.first_action;  // empty when no frontier
  };

  if (coin) {
    if (!gt.coin_room.empty() && gt.coin_room == here) return "take coin";
    if (!gt.coin_room.empty() && visited_.count(gt.coin_room)) {
      auto r = route_first_action(gt, visited_, here, gt.coin_room);
      if (!r.first_action.empty()) return r.first_action;
    }
    auto a = nearest_frontier();
    return a.empty() ? "take coin" : a;  // no frontier left: forlorn guess
  }

  auto held = [&](const std::string& name) {
    for (const auto& it : gt.items)
      if (it.name == name) return it.held;
    return false;
  };
  const envs::GtItem* meal = nullptr;
  for (const auto& it : gt.items)
    if (it.kind == envs::ItemKind::meal) meal = &it;
  if (meal && meal->held) return "eat meal";

  if (recipe_known_) {
    bool ready = true;
    for (const auto& e : gt.recipe.entries) {
      const envs::GtItem* item = nullptr;
      for (const auto& it : gt.items)
        if (it.name == e.ingredient) item = &it;
      if (!item || !item->held || item->cut != e.cut_req ||
          item->cook != e.cook_req)
        ready = false;
    }
    if (ready) {
      if (here == gt.kitchen) return "prepare meal";
      auto r = route_first_action(gt, visited_, here, gt.kitchen);
      if (!r.first_action.empty()) return r.first_action;
    }

    bool need_knife = false;
    for (const auto& e : gt.recipe.entries)
      if (e.cut_req != envs::CutState::none) need_knife = true;

    // cuts are free anywhere; cook trips wait until gathering is done
    if (held("knife") || !need_knife)
      for (const auto& e : gt.recipe.entries) {
        if (e.cut_req == envs::CutState::none) continue;
        const envs::GtItem* item = nullptr;
        for (const auto& it : gt.items)
          if (it.name == e.ingredient) item = &it;
        if (item && item->held && item->cut == envs::CutState::none &&
            item->cook == envs::CookState::none)
          return std::string(envs::cut_verb(e.cut_req)) + " " + e.ingredient;
      }

    // gather: revealed needed items (knife too, when cuts are pending)
    auto want_item = [&](const envs::GtItem& it) {
      if (it.kind == envs::ItemKind::knife) return need_knife && !it.held;
      if (it.kind != envs::ItemKind::ingredient) return false;
      if (it.held) return false;
      for (const auto& e : gt.recipe.entries)
        if (e.ingredient == it.name) return true;
      return false;
    };
    bool gathering = false;
    for (const auto& it : gt.items) {
      if (!want_item(it)) continue;
      gathering = true;
      bool revealed = visited_.count(it.room) && !it.hidden;
      if (!revealed) continue;
      if (it.room == here) return "take " + it.name;
      auto route = route_first_action(gt, visited_, here, it.room);
      if (!route.first_action.empty()) return route.first_action;
    }
    if (gathering) {
      auto a = nearest_frontier();  // something needed is still hidden
      if (!a.empty()) return a;
    }

    for (const auto& e : gt.recipe.entries) {
      if (e.cook_req == envs::CookState::none) continue;
      const envs::GtItem* item = nullptr;
      for (const auto& it : gt.items)
        if (it.name == e.ingredient) item = &it;
      if (!item || !item->held || item->cook != envs::CookState::none) continue;
      if (e.cut_req != envs::CutState::none && item->cut == envs::CutState::none)
        continue;  // cut first
      std::string appliance = e.cook_req == envs::CookState::fried ? "stove"
                              : e.cook_req == envs::CookState::roasted
                                  ? "oven"
                                  : "barbeque";
      for (const auto& r : gt.rooms) {
        if (!visited_.count(r.name)) continue;
        for (const auto& f : r.furniture) {
          if (f.kind != envs::FurnitureKind::appliance || f.name != appliance)
            continue;
          if (r.name == here)
            return "cook " + e.ingredient + " in " + appliance;
          auto route = route_first_action(gt, visited_, here, r.name);
          if (!route.first_action.empty()) return route.first_action;
        }
      }
    }
  }

  auto a = nearest_frontier();
  return a.empty() ? "look around" : a;
}

// ---------------------------------------------------------- random policy --

void RandomPolicy::begin_episode(const envs::WorldState* world, uint64_t seed) {
  (void)world;
  rng_ = Rng(fnv1a("random-policy:" + std::to_string(base_seed_) + ":" +
                   std::to_string(seed)));
}

PolicyOutput RandomPolicy::propose(const PromptContext& ctx) {
  if (ctx.permitted_actions.empty())
    throw PolicyError("random policy needs a nonempty permitted-action list");
  PolicyOutput out;
  out.type = PolicyOutput::Type::action;
  out.text =
      ctx.permitted_actions[rng_.below((uint32_t)ctx.permitted_actions.size())];
  out.transcript = "random pick";
  return out;
}

PolicyOutput FaultyPolicy::propose(const PromptContext& ctx) {
  PolicyOutput out;
  out.type = ctx.strategy == Strategy::action_gen
                 ? PolicyOutput::Type::action
                 : ctx.strategy == Strategy::pddl_gen
                       ? PolicyOutput::Type::full_problem
                       : PolicyOutput::Type::edit_script;
  out.text = text_;
  out.transcript = "faulty";
  return out;
}

}  // namespace planlab::policy
