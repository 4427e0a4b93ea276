// Step semantics and observation templates. Text follows the walkthrough
// style: "You are in the kitchen. ... To the South you see a closed plain
// door. To the West you see the corridor."
#include <algorithm>
#include <cassert>

#include "planlab/envs.hpp"

namespace planlab::envs {

namespace {

std::string capitalize(std::string s) {
  if (!s.empty()) s[0] = (char)std::toupper((unsigned char)s[0]);
  return s;
}

bool item_visible_in(const WorldState& w, const Item& it, int room) {
  if (it.loc.where == ItemLocation::Where::held) return false;
  if (it.loc.room != room) return false;
  if (it.loc.where == ItemLocation::Where::floor) return true;
  const Furniture& f = w.rooms[room].furniture[it.loc.furniture];
  return f.kind != FurnitureKind::container || f.open;
}

bool held(const Item& it) { return it.loc.where == ItemLocation::Where::held; }

const Item* find_held(const WorldState& w, ItemKind kind) {
  for (const auto& it : w.items)
    if (it.kind == kind && held(it)) return &it;
  return nullptr;
}

std::string article_for(const std::string& phrase) {
  if (phrase.empty()) return "a ";
  switch (phrase[0]) {
    case 'a': case 'e': case 'i': case 'o': case 'u': return "an ";
    default: return "a ";
  }
}

// "a red apple", "some salt", "a raw yellow potato", "an oven"
std::string display_name(const WorldState& w, const Item& it) {
  std::string adj;
  if (it.cook != CookState::none) adj += std::string(cook_name(it.cook)) + " ";
  if (it.cut != CutState::none) adj += std::string(cut_name(it.cut)) + " ";
  if (adj.empty() && it.kind == ItemKind::ingredient) {
    const RecipeEntry* e = w.recipe.find(it.name);
    if (e && e->cook_req != CookState::none) adj = "raw ";
  }
  std::string phrase = adj + it.name;
  return (it.mass_noun ? "some " : article_for(phrase)) + phrase;
}

// "X, Y, and Z" (the serial comma appears even for two entries)
std::string list_join(const std::vector<std::string>& xs) {
  if (xs.empty()) return "";
  if (xs.size() == 1) return xs[0];
  std::string out;
  for (size_t i = 0; i + 1 < xs.size(); ++i) out += xs[i] + ", ";
  return out + "and " + xs.back();
}

std::vector<std::string> items_at(const WorldState& w, int room, int furniture) {
  std::vector<std::string> out;
  for (const auto& it : w.items)
    if (it.loc.where == ItemLocation::Where::furniture && it.loc.room == room &&
        it.loc.furniture == furniture)
      out.push_back(display_name(w, it));
  return out;
}

bool meal_ready(const WorldState& w) {
  for (const auto& e : w.recipe.entries) {
    const Item* it = w.find_item(e.ingredient);
    if (!it || !held(*it)) return false;
    if (it->cut != e.cut_req || it->cook != e.cook_req) return false;
  }
  return true;
}

const char* kConnectors[4] = {"In one part of the room you see ",
                              "There is also ", "You also see ",
                              "In another part of the room you see "};

}  // namespace

std::string describe_room(const WorldState& w, int room) {
  const Room& r = w.rooms[room];
  std::string out = "You are in the " + r.name + ".";
  int phrase = 0;
  auto add_phrase = [&](const std::string& body) {
    out += " " + std::string(kConnectors[phrase % 4]) + body + ".";
    ++phrase;
  };
  for (size_t f = 0; f < r.furniture.size(); ++f) {
    const Furniture& fu = r.furniture[f];
    std::string art = article_for(fu.name);
    if (fu.kind == FurnitureKind::appliance) {
      add_phrase(art + fu.name);
    } else if (fu.kind == FurnitureKind::container) {
      if (!fu.open) {
        add_phrase(art + fu.name + " that is closed");
      } else {
        auto contents = items_at(w, room, (int)f);
        if (contents.empty())
          add_phrase(art + fu.name + " that is open");
        else
          add_phrase(art + fu.name + " that is open, holding " +
                     list_join(contents));
      }
    } else {
      auto contents = items_at(w, room, (int)f);
      if (contents.empty())
        add_phrase(art + fu.name + ", that has nothing on it");
      else
        add_phrase(art + fu.name + " that has " + list_join(contents) +
                   " on it");
    }
  }
  for (const auto& it : w.items)
    if (it.loc.where == ItemLocation::Where::floor && it.loc.room == room)
      add_phrase(display_name(w, it));
  out += " \n";
  for (int di = 0; di < 4; ++di) {
    if (!r.exits[di]) continue;
    Dir d = static_cast<Dir>(di);
    const Exit& ex = *r.exits[di];
    std::string dir_cap = capitalize(dir_name(d));
    if (ex.door < 0) {
      out += "To the " + dir_cap + " you see the " + w.rooms[ex.to].name + ". ";
    } else if (!w.doors[ex.door].open) {
      out += "To the " + dir_cap + " you see a closed " + w.doors[ex.door].style +
             ". ";
    } else {
      out += "Through an open " + w.doors[ex.door].style + ", to the " +
             dir_cap + " you see the " + w.rooms[ex.to].name + ". ";
    }
  }
  return out;
}

std::string recipe_text(const Recipe& r) {
  std::string names;
  for (size_t i = 0; i < r.entries.size(); ++i) {
    if (i) names += ", ";
    names += r.entries[i].ingredient;
  }
  std::vector<std::string> directions;
  for (const auto& e : r.entries)
    if (e.cut_req != CutState::none)
      directions.push_back(std::string(cut_verb(e.cut_req)) + " the " +
                           e.ingredient);
  for (const auto& e : r.entries)
    if (e.cook_req != CookState::none)
      directions.push_back(std::string(cook_verb(e.cook_req)) + " the " +
                           e.ingredient);
  directions.push_back("prepare meal");
  std::string dirs;
  for (size_t i = 0; i < directions.size(); ++i) {
    if (i) dirs += ", ";
    dirs += directions[i];
  }
  return "Gather all following ingredients and follow the directions to "
         "prepare this tasty meal.\nIngredients:\n  " +
         names + "\nDirections:\n  " + dirs;
}

std::vector<std::string> permitted_actions(const WorldState& w) {
  std::vector<std::string> out;
  if (w.status != EpisodeStatus::running) return out;
  const Room& r = w.rooms[w.agent_room];
  bool cooking = w.cfg.kind == Kind::cooking;

  if (cooking) {
    out.push_back("look around");
    for (const auto& it : w.items)
      if (it.kind == ItemKind::cookbook && item_visible_in(w, it, w.agent_room))
        out.push_back("examine cookbook");
  }
  for (int di = 0; di < 4; ++di)
    if (r.exits[di] &&
        (r.exits[di]->door < 0 || w.doors[r.exits[di]->door].open))
      out.push_back(std::string("move ") + dir_name(static_cast<Dir>(di)));
  for (int di = 0; di < 4; ++di)
    if (r.exits[di] && r.exits[di]->door >= 0 &&
        !w.doors[r.exits[di]->door].open)
      out.push_back(std::string("open door to ") +
                    dir_name(static_cast<Dir>(di)));
  if (!cooking) {
    for (const auto& it : w.items)
      if (it.kind == ItemKind::coin && item_visible_in(w, it, w.agent_room))
        out.push_back("take coin");
    for (const auto& it : w.items)
      if (it.kind == ItemKind::distractor && item_visible_in(w, it, w.agent_room))
        out.push_back("take " + it.name);
    return out;
  }

  for (const auto& f : r.furniture)
    if (f.kind == FurnitureKind::container && !f.open)
      out.push_back("open " + f.name);
  for (const auto& it : w.items)
    if ((it.kind == ItemKind::ingredient || it.kind == ItemKind::knife) &&
        item_visible_in(w, it, w.agent_room))
      out.push_back("take " + it.name);
  if (find_held(w, ItemKind::knife)) {
    for (const auto& it : w.items)
      if (it.kind == ItemKind::ingredient && held(it) &&
          it.cut == CutState::none && it.cook == CookState::none)
        for (const char* v : {"slice", "dice", "chop"})
          out.push_back(std::string(v) + " " + it.name);
  }
  for (const auto& it : w.items)
    if (it.kind == ItemKind::ingredient && held(it) && it.cook == CookState::none)
      for (const auto& f : r.furniture)
        if (f.kind == FurnitureKind::appliance)
          out.push_back("cook " + it.name + " in " + f.name);
  if (w.agent_room == w.kitchen && !find_held(w, ItemKind::meal) &&
      !w.recipe.entries.empty() && meal_ready(w))
    out.push_back("prepare meal");
  if (find_held(w, ItemKind::meal)) out.push_back("eat meal");
  return out;
}

namespace {

StepOutcome ok() { return {StepOutcome::Kind::ok, ""}; }
StepOutcome invalid(const std::string& reason) {
  return {StepOutcome::Kind::invalid, reason};
}

struct ActionEffect {
  StepOutcome outcome;
  std::string text;
};

ActionEffect do_move(WorldState& w, Dir d) {
  const Room& r = w.rooms[w.agent_room];
  const auto& ex = r.exits[static_cast<int>(d)];
  if (!ex) return {invalid("no exit"), "You can't go that way."};
  if (ex->door >= 0 && !w.doors[ex->door].open)
    return {invalid("closed door"), "You can't move there, the door is closed."};
  w.agent_room = ex->to;
  return {ok(), describe_room(w, w.agent_room)};
}

ActionEffect do_open_door(WorldState& w, Dir d) {
  Room& r = w.rooms[w.agent_room];
  auto& ex = r.exits[static_cast<int>(d)];
  if (!ex || ex->door < 0)
    return {invalid("no door"), "There is no door there."};
  if (w.doors[ex->door].open)
    return {invalid("door already open"), "That door is already open."};
  w.doors[ex->door].open = true;  // shared Door: both sides open at once
  return {ok(), "You open the " + w.doors[ex->door].style + ", revealing the " +
                    w.rooms[ex->to].name + "."};
}

ActionEffect do_take_coin(WorldState& w) {
  for (auto& it : w.items)
    if (it.kind == ItemKind::coin && item_visible_in(w, it, w.agent_room)) {
      it.loc = {ItemLocation::Where::held, -1, -1};
      return {{StepOutcome::Kind::won, ""}, "You take the coin."};
    }
  return {invalid("no coin here"), "There is no coin here."};
}

ActionEffect do_open_container(WorldState& w, const std::string& name) {
  Room& r = w.rooms[w.agent_room];
  for (size_t f = 0; f < r.furniture.size(); ++f) {
    Furniture& fu = r.furniture[f];
    if (fu.name != name) continue;
    if (fu.kind != FurnitureKind::container)
      return {invalid("not openable"), "You can't open that."};
    if (fu.open)
      return {invalid("already open"), "It is already open."};
    fu.open = true;
    auto contents = items_at(w, w.agent_room, (int)f);
    if (contents.empty())
      return {ok(), "You open the " + name + ". It's empty inside."};
    return {ok(), "You open the " + name + ". The " + name + " contains " +
                      list_join(contents) + "."};
  }
  return {invalid("nothing to open"), "You see no " + name + " here."};
}

ActionEffect do_take(WorldState& w, const std::string& name) {
  for (auto& it : w.items) {
    if (it.name != name) continue;
    if (held(it)) return {invalid("already carrying"), "You already have it."};
    if (it.kind != ItemKind::ingredient && it.kind != ItemKind::knife &&
        it.kind != ItemKind::distractor)
      break;
    if (!item_visible_in(w, it, w.agent_room)) break;
    it.loc = {ItemLocation::Where::held, -1, -1};
    return {ok(), "You take the " + name + "."};
  }
  return {invalid("not here"), "You see no " + name + " here."};
}

ActionEffect do_cut(WorldState& w, CutState verb, const std::string& name) {
  Item* target = nullptr;
  for (auto& it : w.items)
    if (it.name == name) target = &it;
  if (!target || target->kind != ItemKind::ingredient)
    return {invalid("not an ingredient"), "You can't do that."};
  if (!held(*target))
    return {invalid("not carrying"), "You aren't carrying the " + name + "."};
  if (!find_held(w, ItemKind::knife))
    return {invalid("no knife"), "You need the knife for that."};
  if (target->cut != CutState::none || target->cook != CookState::none)
    return {invalid("already processed"), "It has already been processed."};
  const RecipeEntry* e = w.recipe.find(name);
  std::string text =
      "You " + std::string(cut_verb(verb)) + " the " + name + ".";
  if (!e || e->cut_req == CutState::none) {
    w.status = EpisodeStatus::lost;
    w.end_reason = "processed incorrectly";
    return {{StepOutcome::Kind::lost, w.end_reason},
            text + "\nThe recipe did not call for that. You lost."};
  }
  if (e->cut_req != verb) {
    w.status = EpisodeStatus::lost;
    w.end_reason = std::string(cut_name(verb)) + " instead of " +
                   cut_name(e->cut_req);
    return {{StepOutcome::Kind::lost, w.end_reason},
            text + "\nThe recipe did not call for that. You lost."};
  }
  target->cut = verb;
  return {ok(), text};
}

ActionEffect do_cook(WorldState& w, const std::string& name,
                     const std::string& appliance) {
  const Furniture* app = nullptr;
  for (const auto& f : w.rooms[w.agent_room].furniture)
    if (f.kind == FurnitureKind::appliance && f.name == appliance) app = &f;
  if (!app)
    return {invalid("no such appliance here"),
            "You see no " + appliance + " here."};
  Item* target = nullptr;
  for (auto& it : w.items)
    if (it.name == name) target = &it;
  if (!target || target->kind != ItemKind::ingredient)
    return {invalid("not an ingredient"), "You can't cook that."};
  if (!held(*target))
    return {invalid("not carrying"), "You aren't carrying the " + name + "."};
  if (target->cook != CookState::none)
    return {invalid("already cooked"), "It has already been cooked."};

  CookState verb = appliance == "stove"  ? CookState::fried
                   : appliance == "oven" ? CookState::roasted
                                         : CookState::grilled;
  std::string text = "You " + std::string(cook_verb(verb)) + " the " + name +
                     " with the " + appliance + ".";
  const RecipeEntry* e = w.recipe.find(name);
  if (!e || e->cook_req == CookState::none) {
    w.status = EpisodeStatus::lost;
    w.end_reason = "processed incorrectly";
    return {{StepOutcome::Kind::lost, w.end_reason},
            text + "\nThe recipe did not call for that. You lost."};
  }
  if (e->cook_req != verb) {
    w.status = EpisodeStatus::lost;
    w.end_reason = std::string(cook_name(verb)) + " instead of " +
                   cook_name(e->cook_req);
    return {{StepOutcome::Kind::lost, w.end_reason},
            text + "\nThe recipe did not call for that. You lost."};
  }
  if (e->cut_req != CutState::none && target->cut == CutState::none) {
    w.status = EpisodeStatus::lost;
    w.end_reason = std::string("was not ") + cut_name(e->cut_req) + " before " +
                   cook_name(verb);
    return {{StepOutcome::Kind::lost, w.end_reason},
            text + "\nIt should have been " + cut_name(e->cut_req) +
                " first. You lost."};
  }
  target->cook = verb;
  return {ok(), text};
}

ActionEffect do_prepare(WorldState& w) {
  if (w.agent_room != w.kitchen)
    return {invalid("not in the kitchen"),
            "Meals can only be prepared in the kitchen."};
  if (find_held(w, ItemKind::meal))
    return {invalid("meal already prepared"), "You already prepared the meal."};
  if (!meal_ready(w))
    return {invalid("ingredients not ready"),
            "You are still missing something for the meal."};
  std::erase_if(w.items, [&](const Item& it) {
    return it.kind == ItemKind::ingredient && w.recipe.find(it.name) != nullptr;
  });
  Item meal;
  meal.name = "meal";
  meal.kind = ItemKind::meal;
  meal.loc = {ItemLocation::Where::held, -1, -1};
  w.items.push_back(meal);
  return {ok(), "Adding the meal to your inventory."};
}

ActionEffect do_eat(WorldState& w) {
  if (!find_held(w, ItemKind::meal))
    return {invalid("no meal"), "You have no meal to eat."};
  w.status = EpisodeStatus::won;
  return {{StepOutcome::Kind::won, ""}, "You eat the meal.  It is delicious."};
}

ActionEffect execute(WorldState& w, const std::string& raw) {
  std::string a = lowercased(raw);
  // trim
  size_t b = a.find_first_not_of(" \t");
  if (b == std::string::npos) return {invalid("empty action"), "Say again?"};
  a = a.substr(b, a.find_last_not_of(" \t") - b + 1);

  bool cooking = w.cfg.kind == Kind::cooking;
  auto starts = [&](const char* p) { return a.rfind(p, 0) == 0; };

  if (starts("move ")) {
    auto d = dir_from_name(a.substr(5));
    if (!d) return {invalid("bad direction"), "You can't go that way."};
    return do_move(w, *d);
  }
  if (starts("open door to ")) {
    auto d = dir_from_name(a.substr(13));
    if (!d) return {invalid("bad direction"), "There is no door there."};
    return do_open_door(w, *d);
  }
  if (!cooking) {
    if (a == "take coin") return do_take_coin(w);
    if (starts("take ")) return do_take(w, a.substr(5));
    return {invalid("unrecognized action"), "That's not a verb I recognise."};
  }

  if (a == "look around") return {ok(), describe_room(w, w.agent_room)};
  if (a == "examine cookbook") {
    for (const auto& it : w.items)
      if (it.kind == ItemKind::cookbook && item_visible_in(w, it, w.agent_room))
        return {ok(), recipe_text(w.recipe)};
    return {invalid("no cookbook here"), "You see no cookbook here."};
  }
  if (starts("open ")) return do_open_container(w, a.substr(5));
  if (starts("take ")) return do_take(w, a.substr(5));
  if (starts("slice ")) return do_cut(w, CutState::sliced, a.substr(6));
  if (starts("dice ")) return do_cut(w, CutState::diced, a.substr(5));
  if (starts("chop ")) return do_cut(w, CutState::chopped, a.substr(5));
  if (starts("cook ")) {
    size_t in = a.rfind(" in ");
    if (in == std::string::npos || in <= 5)
      return {invalid("unrecognized action"),
              "Cook what in what? Say 'cook <item> in <appliance>'."};
    return do_cook(w, a.substr(5, in - 5), a.substr(in + 4));
  }
  if (a == "prepare meal") return do_prepare(w);
  if (a == "eat meal") return do_eat(w);
  return {invalid("unrecognized action"), "That's not a verb I recognise."};
}

}  // namespace

StepResult step(WorldState& w, const std::string& action) {
  if (w.status != EpisodeStatus::running) throw EpisodeFinished();
  ActionEffect eff = execute(w, action);
  ++w.steps;
  if (eff.outcome.kind == StepOutcome::Kind::won) {
    w.status = EpisodeStatus::won;
    w.end_reason = "";
  } else if (eff.outcome.kind == StepOutcome::Kind::lost) {
    w.status = EpisodeStatus::lost;
  } else if (w.steps >= w.cfg.max_steps) {
    w.status = EpisodeStatus::lost;
    w.end_reason = "max-steps";
    eff.outcome = {StepOutcome::Kind::lost, "max-steps"};
    eff.text += "\nYou have run out of steps!";
  }
  return {Observation{eff.text, permitted_actions(w)}, eff.outcome};
}

}  // namespace planlab::envs
