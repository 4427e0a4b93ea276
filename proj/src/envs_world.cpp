// World generation: grid-embedded random spanning tree plus extra edges, some
// exits behind closed doors; themed furniture and recipe/ingredient placement
// for Cooking World. Same config (incl. seed) always builds the same world.
#include <algorithm>
#include <deque>
#include <map>

#include "planlab/envs.hpp"

namespace planlab::envs {

Dir opposite(Dir d) {
  switch (d) {
    case Dir::north: return Dir::south;
    case Dir::east: return Dir::west;
    case Dir::south: return Dir::north;
    case Dir::west: return Dir::east;
  }
  return Dir::north;
}

const char* dir_name(Dir d) {
  switch (d) {
    case Dir::north: return "north";
    case Dir::east: return "east";
    case Dir::south: return "south";
    case Dir::west: return "west";
  }
  return "?";
}

std::optional<Dir> dir_from_name(const std::string& s) {
  if (s == "north") return Dir::north;
  if (s == "east") return Dir::east;
  if (s == "south") return Dir::south;
  if (s == "west") return Dir::west;
  return std::nullopt;
}

const char* cut_name(CutState c) {
  switch (c) {
    case CutState::none: return "none";
    case CutState::sliced: return "sliced";
    case CutState::diced: return "diced";
    case CutState::chopped: return "chopped";
  }
  return "?";
}

const char* cook_name(CookState c) {
  switch (c) {
    case CookState::none: return "none";
    case CookState::fried: return "fried";
    case CookState::roasted: return "roasted";
    case CookState::grilled: return "grilled";
  }
  return "?";
}

const char* cut_verb(CutState c) {
  switch (c) {
    case CutState::sliced: return "slice";
    case CutState::diced: return "dice";
    case CutState::chopped: return "chop";
    default: return "?";
  }
}

const char* cook_verb(CookState c) {
  switch (c) {
    case CookState::fried: return "fry";
    case CookState::roasted: return "roast";
    case CookState::grilled: return "grill";
    default: return "?";
  }
}

const char* outcome_name(StepOutcome::Kind k) {
  switch (k) {
    case StepOutcome::Kind::ok: return "ok";
    case StepOutcome::Kind::invalid: return "invalid";
    case StepOutcome::Kind::won: return "won";
    case StepOutcome::Kind::lost: return "lost";
  }
  return "?";
}

const RecipeEntry* Recipe::find(const std::string& name) const {
  for (const auto& e : entries)
    if (e.ingredient == name) return &e;
  return nullptr;
}

int WorldState::room_index(const std::string& name) const {
  for (size_t i = 0; i < rooms.size(); ++i)
    if (rooms[i].name == name) return static_cast<int>(i);
  return -1;
}

const Item* WorldState::find_item(const std::string& name) const {
  for (const auto& it : items)
    if (it.name == name) return &it;
  return nullptr;
}

namespace {

const std::vector<std::string> kRoomPool = {
    "kitchen", "corridor",  "pantry",  "bedroom", "backyard",
    "livingroom", "bathroom", "cellar", "attic",  "garage",
    "hallway", "study",     "lounge",  "workshop", "balcony",
    "closet",  "porch",     "basement", "den",    "foyer"};

const std::vector<std::string> kDoorStyles = {
    "plain door", "wood door", "sliding patio door", "frosted-glass door",
    "metal door", "screen door"};

struct IngredientDef {
  const char* name;
  bool mass;
};

// Seasonings (mass nouns) never carry processing directions.
const std::vector<IngredientDef> kSeasonings = {{"salt", true},
                                                {"black pepper", true}};
const std::vector<IngredientDef> kFoods = {
    {"block of cheese", false}, {"red apple", false},
    {"yellow potato", false},   {"carrot", false},
    {"white onion", false},     {"purple potato", false},
    {"red hot pepper", false},  {"banana", false},
    {"block of tofu", false}};

struct FurnitureDef {
  const char* name;
  FurnitureKind kind;
};

const std::map<std::string, std::vector<FurnitureDef>>& themed_furniture() {
  using FK = FurnitureKind;
  static const std::map<std::string, std::vector<FurnitureDef>> m = {
      {"corridor",
       {{"key holder", FK::surface},
        {"shoe cabinet", FK::container},
        {"umbrella stand", FK::surface},
        {"hat rack", FK::surface},
        {"coat hanger", FK::surface}}},
      {"pantry", {{"shelf", FK::surface}, {"folding chair", FK::surface}}},
      {"bedroom",
       {{"dressing table", FK::surface},
        {"chest of drawers", FK::container},
        {"wardrobe", FK::container},
        {"desk", FK::surface},
        {"night stand", FK::surface},
        {"bed", FK::surface}}},
      {"backyard",
       {{"workbench", FK::surface},
        {"patio chair", FK::surface},
        {"patio table", FK::surface},
        {"clothes line", FK::surface},
        {"garden", FK::surface}}},
      {"livingroom",
       {{"sofa", FK::surface},
        {"tv stand", FK::surface},
        {"bookcase", FK::container},
        {"coffee table", FK::surface}}},
      {"bathroom",
       {{"sink", FK::surface},
        {"medicine cabinet", FK::container},
        {"bath", FK::surface}}},
      {"cellar", {{"crate", FK::container}, {"wine rack", FK::surface}}},
      {"attic", {{"storage box", FK::container}, {"dusty shelf", FK::surface}}},
      {"garage", {{"toolbox", FK::container}, {"workbench", FK::surface}}},
      {"hallway", {{"side table", FK::surface}, {"coat rack", FK::surface}}},
      {"study",
       {{"desk", FK::surface},
        {"filing cabinet", FK::container},
        {"bookshelf", FK::surface}}},
      {"lounge",
       {{"armchair", FK::surface},
        {"side table", FK::surface},
        {"cabinet", FK::container}}},
      {"workshop", {{"workbench", FK::surface}, {"tool chest", FK::container}}},
      {"balcony", {{"plant stand", FK::surface}, {"deck chair", FK::surface}}},
      {"closet", {{"shoe rack", FK::surface}, {"storage box", FK::container}}},
      {"porch", {{"bench", FK::surface}}},
      {"basement", {{"crate", FK::container}, {"shelf", FK::surface}}},
      {"den", {{"couch", FK::surface}, {"tv stand", FK::surface}}},
      {"foyer",
       {{"console table", FK::surface}, {"umbrella stand", FK::surface}}},
  };
  return m;
}

void cell_step(int& x, int& y, Dir d) {
  switch (d) {
    case Dir::north: ++y; break;
    case Dir::east: ++x; break;
    case Dir::south: --y; break;
    case Dir::west: --x; break;
  }
}

void connect(WorldState& w, int a, int b, Dir d, int door) {
  w.rooms[a].exits[static_cast<int>(d)] = Exit{b, door};
  w.rooms[b].exits[static_cast<int>(opposite(d))] = Exit{a, door};
}

int make_door(WorldState& w, Rng& rng) {
  Door door;
  door.style = kDoorStyles[rng.below((uint32_t)kDoorStyles.size())];
  door.open = false;
  w.doors.push_back(door);
  return static_cast<int>(w.doors.size()) - 1;
}

// Random tree growth on the 4-neighbor grid, then extra edges between
// adjacent cells, then doors on a fraction of all edges. `snake_bias`
// prefers extending from the most recently placed room, stretching the
// tree diameter (longer exploration paths).
void build_map(WorldState& w, const std::vector<std::string>& names, Rng& rng,
               double extra_edge_p, double door_p, double snake_bias) {
  std::map<std::pair<int, int>, int> cells;
  w.rooms.clear();
  w.rooms.resize(names.size());
  w.rooms[0].name = names[0];
  cells[{0, 0}] = 0;
  for (size_t i = 1; i < names.size(); ++i) {
    struct Slot {
      int room;
      Dir d;
      int x, y;
    };
    std::vector<Slot> slots;
    auto collect = [&](size_t r) {
      for (int di = 0; di < 4; ++di) {
        int x = w.rooms[r].x, y = w.rooms[r].y;
        cell_step(x, y, static_cast<Dir>(di));
        if (!cells.count({x, y}))
          slots.push_back({static_cast<int>(r), static_cast<Dir>(di), x, y});
      }
    };
    if (rng.chance(snake_bias)) collect(i - 1);
    if (slots.empty())
      for (size_t r = 0; r < i; ++r) collect(r);
    const Slot& s = slots[rng.below((uint32_t)slots.size())];
    w.rooms[i].name = names[i];
    w.rooms[i].x = s.x;
    w.rooms[i].y = s.y;
    cells[{s.x, s.y}] = static_cast<int>(i);
    connect(w, s.room, static_cast<int>(i), s.d, -1);
  }
  // extra edges between adjacent, unconnected cells (scan north/east only)
  for (size_t r = 0; r < w.rooms.size(); ++r)
    for (Dir d : {Dir::north, Dir::east}) {
      int x = w.rooms[r].x, y = w.rooms[r].y;
      cell_step(x, y, d);
      auto it = cells.find({x, y});
      if (it == cells.end()) continue;
      if (w.rooms[r].exits[static_cast<int>(d)]) continue;
      if (rng.chance(extra_edge_p)) connect(w, (int)r, it->second, d, -1);
    }
  // doors: visit each edge once
  for (size_t r = 0; r < w.rooms.size(); ++r)
    for (Dir d : {Dir::north, Dir::east}) {
      auto& ex = w.rooms[r].exits[static_cast<int>(d)];
      if (!ex) continue;
      if (rng.chance(door_p)) {
        int door = make_door(w, rng);
        connect(w, (int)r, ex->to, d, door);
      }
    }
}

int add_furniture(WorldState& w, int room, const std::string& name,
                  FurnitureKind kind) {
  w.rooms[room].furniture.push_back({name, kind, false});
  return static_cast<int>(w.rooms[room].furniture.size()) - 1;
}

void place_item(WorldState& w, Item item, int room, int furniture) {
  item.loc.where =
      furniture >= 0 ? ItemLocation::Where::furniture : ItemLocation::Where::floor;
  item.loc.room = room;
  item.loc.furniture = furniture;
  w.items.push_back(std::move(item));
}

// Inert takeable objects scattered through coin worlds, mirroring the
// distractor items found in comparable text games.
const std::vector<std::string> kDistractors = {
    "dusty book",  "old key",   "broken lamp", "wooden spoon", "rusty nail",
    "pebble",      "button",    "candle",      "cork",         "bottle cap",
    "ball of string", "matchbox", "feather",   "marble",       "piece of chalk",
    "thimble",     "acorn",     "shoelace",    "coaster",      "postcard",
    "pine cone",   "dry sponge", "clothes peg", "paper crane",  "bent fork",
    "chess pawn",  "dice",      "eraser",      "hairpin",      "tin whistle",
    "seashell",    "magnet",    "crayon",      "domino",       "bookmark",
    "ticket stub", "washer",    "spring",      "ribbon",       "golf ball"};

WorldState build_coin(const EnvConfig& cfg, Rng& rng) {
  WorldState w;
  w.cfg = cfg;
  std::vector<std::string> names = kRoomPool;
  rng.shuffle(names);
  names.resize(cfg.num_rooms);
  build_map(w, names, rng, 0.05, 0.5, 0.9);
  w.start_room = w.agent_room = 0;
  // Coin goes into the deeper part of the map: uniform among rooms at
  // >= 60% of the start room's eccentricity.
  std::vector<int> dist(w.rooms.size(), -1);
  std::deque<int> q{0};
  dist[0] = 0;
  int max_d = 0;
  while (!q.empty()) {
    int cur = q.front();
    q.pop_front();
    for (int di = 0; di < 4; ++di)
      if (w.rooms[cur].exits[di] && dist[w.rooms[cur].exits[di]->to] < 0) {
        dist[w.rooms[cur].exits[di]->to] = dist[cur] + 1;
        max_d = std::max(max_d, dist[cur] + 1);
        q.push_back(w.rooms[cur].exits[di]->to);
      }
  }
  int min_depth = std::max(2, (max_d * 3 + 4) / 5);
  std::vector<int> eligible;
  for (size_t r = 1; r < w.rooms.size(); ++r)
    if (dist[r] >= min_depth) eligible.push_back((int)r);
  if (eligible.empty()) eligible.push_back((int)w.rooms.size() - 1);
  int coin_room = eligible[rng.below((uint32_t)eligible.size())];
  Item coin;
  coin.name = "coin";
  coin.kind = ItemKind::coin;
  place_item(w, coin, coin_room, -1);
  std::vector<std::string> junk = kDistractors;
  rng.shuffle(junk);
  size_t next = 0;
  for (size_t r = 0; r < w.rooms.size(); ++r) {
    uint32_t count = 2 + rng.below(2);  // 2-3 distractors per room
    for (uint32_t i = 0; i < count && next < junk.size(); ++i) {
      Item it;
      it.name = junk[next++];
      it.kind = ItemKind::distractor;
      place_item(w, it, (int)r, -1);
    }
  }
  return w;
}

void build_kitchen(WorldState& w, int room, Rng& rng, bool everything) {
  add_furniture(w, room, "stove", FurnitureKind::appliance);
  add_furniture(w, room, "oven", FurnitureKind::appliance);
  add_furniture(w, room, "fridge", FurnitureKind::container);
  int counter = add_furniture(w, room, "counter", FurnitureKind::surface);
  add_furniture(w, room, "kitchen cupboard", FurnitureKind::container);
  if (everything || rng.chance(0.5))
    add_furniture(w, room, "cutlery drawer", FurnitureKind::container);
  if (everything || rng.chance(0.5))
    add_furniture(w, room, "trash can", FurnitureKind::container);
  if (everything || rng.chance(0.5))
    add_furniture(w, room, "dishwasher", FurnitureKind::container);
  if (everything || rng.chance(0.5))
    add_furniture(w, room, "dining chair", FurnitureKind::surface);
  Item knife;
  knife.name = "knife";
  knife.kind = ItemKind::knife;
  place_item(w, knife, room, counter);
  Item book;
  book.name = "cookbook";
  book.kind = ItemKind::cookbook;
  place_item(w, book, room, counter);
}

void furnish_room(WorldState& w, int room, Rng& rng) {
  auto it = themed_furniture().find(w.rooms[room].name);
  static const std::vector<FurnitureDef> kGeneric = {
      {"small table", FurnitureKind::surface},
      {"storage chest", FurnitureKind::container}};
  const auto& defs = it != themed_furniture().end() ? it->second : kGeneric;
  int containers = 0;
  bool first = true;
  for (const auto& def : defs) {
    bool is_container = def.kind == FurnitureKind::container;
    if (is_container && containers >= 1) continue;  // keeps episodes short
    bool include = first || rng.chance(is_container ? 0.6 : 0.5);
    if (!include) continue;
    add_furniture(w, room, def.name, def.kind);
    if (is_container) ++containers;
    first = false;
  }
}

WorldState build_cooking(const EnvConfig& cfg, Rng& rng) {
  WorldState w;
  w.cfg = cfg;
  bool hard = cfg.difficulty == Difficulty::hard;

  std::vector<std::string> others;
  for (const auto& n : kRoomPool)
    if (n != "kitchen") others.push_back(n);
  rng.shuffle(others);
  others.resize(cfg.num_rooms - 1);
  if (hard && std::find(others.begin(), others.end(), "backyard") == others.end())
    others.back() = "backyard";  // the barbeque must exist somewhere
  std::vector<std::string> names = {"kitchen"};
  names.insert(names.end(), others.begin(), others.end());
  build_map(w, names, rng, 0.15, 0.35, 0.3);
  w.start_room = w.agent_room = 0;
  w.kitchen = 0;

  build_kitchen(w, 0, rng, false);
  for (size_t r = 1; r < w.rooms.size(); ++r) {
    furnish_room(w, (int)r, rng);
    if (w.rooms[r].name == "backyard")
      add_furniture(w, (int)r, "barbeque", FurnitureKind::appliance);
  }

  // recipe: seasonings carry no directions; every food gets a cut direction;
  // on hard, exactly one food additionally gets a cook direction
  std::vector<IngredientDef> foods = kFoods;
  rng.shuffle(foods);
  std::vector<IngredientDef> chosen;
  if (hard) {
    chosen.push_back(kSeasonings[0]);
    chosen.push_back(kSeasonings[1]);
    for (int i = 0; i < cfg.num_ingredients - 2; ++i) chosen.push_back(foods[i]);
  } else {
    for (int i = 0; i < cfg.num_ingredients; ++i) chosen.push_back(foods[i]);
  }
  std::sort(chosen.begin(), chosen.end(),
            [](const IngredientDef& a, const IngredientDef& b) {
              return std::string(a.name) < std::string(b.name);
            });

  const CutState cuts[] = {CutState::sliced, CutState::diced, CutState::chopped};
  const CookState cooks[] = {CookState::fried, CookState::roasted,
                             CookState::grilled};
  std::vector<size_t> food_positions;
  for (size_t i = 0; i < chosen.size(); ++i)
    if (!chosen[i].mass) food_positions.push_back(i);
  size_t cook_at = hard ? food_positions[rng.below((uint32_t)food_positions.size())]
                        : SIZE_MAX;
  for (size_t i = 0; i < chosen.size(); ++i) {
    RecipeEntry e;
    e.ingredient = chosen[i].name;
    if (!chosen[i].mass) e.cut_req = cuts[rng.below(3)];
    if (i == cook_at) e.cook_req = cooks[rng.below(3)];
    w.recipe.entries.push_back(e);
  }

  // place ingredients on surfaces or inside containers, kitchen-biased
  for (size_t i = 0; i < chosen.size(); ++i) {
    int room = rng.chance(0.45)
                   ? 0
                   : (int)rng.below((uint32_t)w.rooms.size());
    std::vector<int> slots;
    for (size_t f = 0; f < w.rooms[room].furniture.size(); ++f)
      if (w.rooms[room].furniture[f].kind != FurnitureKind::appliance)
        slots.push_back((int)f);
    Item ing;
    ing.name = chosen[i].name;
    ing.kind = ItemKind::ingredient;
    ing.mass_noun = chosen[i].mass;
    place_item(w, ing, room, slots[rng.below((uint32_t)slots.size())]);
  }
  return w;
}

// The showcase cooking-hard world: kitchen/corridor/pantry/bedroom/backyard,
// cheese in the fridge, seasonings on the pantry shelf, grill the potato on
// the backyard barbeque.
WorldState build_cooking_fixture(const EnvConfig& cfg) {
  WorldState w;
  w.cfg = cfg;
  w.cfg.num_rooms = 5;
  w.cfg.num_ingredients = 5;

  w.rooms.resize(5);
  auto room = [&](int i, const char* name, int x, int y) {
    w.rooms[i].name = name;
    w.rooms[i].x = x;
    w.rooms[i].y = y;
  };
  room(0, "kitchen", 0, 0);
  room(1, "corridor", -1, 0);
  room(2, "pantry", 0, -1);
  room(3, "bedroom", -1, 1);
  room(4, "backyard", -2, 0);

  w.doors.push_back({"plain door", false});         // kitchen <-> pantry
  w.doors.push_back({"wood door", false});          // corridor <-> bedroom
  w.doors.push_back({"sliding patio door", false}); // corridor <-> backyard
  connect(w, 0, 1, Dir::west, -1);
  connect(w, 0, 2, Dir::south, 0);
  connect(w, 1, 3, Dir::north, 1);
  connect(w, 1, 4, Dir::west, 2);

  // kitchen, in walkthrough order
  add_furniture(w, 0, "stove", FurnitureKind::appliance);
  add_furniture(w, 0, "oven", FurnitureKind::appliance);
  int fridge = add_furniture(w, 0, "fridge", FurnitureKind::container);
  int counter = add_furniture(w, 0, "counter", FurnitureKind::surface);
  add_furniture(w, 0, "kitchen cupboard", FurnitureKind::container);
  add_furniture(w, 0, "cutlery drawer", FurnitureKind::container);
  add_furniture(w, 0, "trash can", FurnitureKind::container);
  add_furniture(w, 0, "dishwasher", FurnitureKind::container);
  add_furniture(w, 0, "dining chair", FurnitureKind::surface);
  // corridor
  add_furniture(w, 1, "key holder", FurnitureKind::surface);
  add_furniture(w, 1, "shoe cabinet", FurnitureKind::container);
  add_furniture(w, 1, "umbrella stand", FurnitureKind::surface);
  add_furniture(w, 1, "hat rack", FurnitureKind::surface);
  add_furniture(w, 1, "coat hanger", FurnitureKind::surface);
  // pantry
  add_furniture(w, 2, "folding chair", FurnitureKind::surface);
  int shelf = add_furniture(w, 2, "shelf", FurnitureKind::surface);
  // bedroom
  add_furniture(w, 3, "dressing table", FurnitureKind::surface);
  add_furniture(w, 3, "desk chair", FurnitureKind::surface);
  add_furniture(w, 3, "desk", FurnitureKind::surface);
  add_furniture(w, 3, "chest of drawers", FurnitureKind::container);
  add_furniture(w, 3, "wardrobe", FurnitureKind::container);
  add_furniture(w, 3, "night stand", FurnitureKind::surface);
  add_furniture(w, 3, "bed", FurnitureKind::surface);
  // backyard
  add_furniture(w, 4, "barbeque", FurnitureKind::appliance);
  add_furniture(w, 4, "workbench", FurnitureKind::surface);
  add_furniture(w, 4, "patio chair", FurnitureKind::surface);
  add_furniture(w, 4, "patio table", FurnitureKind::surface);
  add_furniture(w, 4, "clothes line", FurnitureKind::surface);
  add_furniture(w, 4, "garden", FurnitureKind::surface);

  auto ing = [&](const char* name, bool mass, int room_, int furn) {
    Item it;
    it.name = name;
    it.kind = ItemKind::ingredient;
    it.mass_noun = mass;
    place_item(w, it, room_, furn);
  };
  Item knife;
  knife.name = "knife";
  knife.kind = ItemKind::knife;
  place_item(w, knife, 0, counter);
  ing("red apple", false, 0, counter);
  ing("yellow potato", false, 0, counter);
  Item book;
  book.name = "cookbook";
  book.kind = ItemKind::cookbook;
  place_item(w, book, 0, counter);
  ing("block of cheese", false, 0, fridge);
  ing("black pepper", true, 2, shelf);
  ing("salt", true, 2, shelf);

  w.recipe.entries = {
      {"black pepper", CutState::none, CookState::none},
      {"block of cheese", CutState::sliced, CookState::none},
      {"salt", CutState::none, CookState::none},
      {"red apple", CutState::diced, CookState::none},
      {"yellow potato", CutState::chopped, CookState::grilled},
  };
  w.start_room = w.agent_room = 0;
  w.kitchen = 0;
  return w;
}

}  // namespace

std::pair<WorldState, Observation> new_episode(const EnvConfig& cfg_in) {
  EnvConfig cfg = cfg_in;
  if (cfg.kind == Kind::coin) {
    if (cfg.difficulty != Difficulty::none)
      throw ConfigError("coin has no difficulty settings");
    if (cfg.num_rooms == 0) cfg.num_rooms = 12;
    if (cfg.num_ingredients != 0)
      throw ConfigError("coin has no ingredients");
  } else {
    if (cfg.difficulty == Difficulty::none)
      throw ConfigError("cooking requires difficulty easy|hard");
    if (cfg.num_rooms == 0)
      cfg.num_rooms = cfg.difficulty == Difficulty::easy ? 3 : 9;
    if (cfg.num_ingredients == 0)
      cfg.num_ingredients = cfg.difficulty == Difficulty::easy ? 2 : 5;
    if (cfg.difficulty == Difficulty::hard &&
        (cfg.num_rooms <= 3 || cfg.num_ingredients <= 2))
      throw ConfigError("hard must exceed easy in rooms and ingredients");
    int pool = (int)(kFoods.size() + (cfg.difficulty == Difficulty::hard ? 2 : 0));
    if (cfg.num_ingredients > pool)
      throw ConfigError("more ingredients than placeable kinds");
    if (cfg.difficulty == Difficulty::hard && cfg.num_ingredients < 3)
      throw ConfigError("hard needs at least 3 ingredients");
  }
  if (cfg.num_rooms < 2) throw ConfigError("num_rooms must be >= 2");
  if (cfg.num_rooms > (int)kRoomPool.size())
    throw ConfigError("num_rooms exceeds the room name pool");
  if (cfg.max_steps < 0) throw ConfigError("max_steps must be >= 0");

  std::string key = std::string(cfg.kind == Kind::coin ? "coin" : "cooking") +
                    ":" +
                    (cfg.difficulty == Difficulty::easy
                         ? "easy"
                         : cfg.difficulty == Difficulty::hard ? "hard" : "-") +
                    ":" + std::to_string(cfg.seed) + ":" +
                    std::to_string(cfg.num_rooms) + ":" +
                    std::to_string(cfg.num_ingredients);
  Rng rng(fnv1a(key));

  WorldState w;
  if (cfg.kind == Kind::coin) {
    w = build_coin(cfg, rng);
  } else if (cfg.seed == kCookingFixtureSeed &&
             cfg.difficulty == Difficulty::hard) {
    w = build_cooking_fixture(cfg);
  } else {
    w = build_cooking(cfg, rng);
  }
  if (w.cfg.max_steps == 0) {
    w.status = EpisodeStatus::lost;
    w.end_reason = "max-steps";
  }
  Observation obs{describe_room(w, w.agent_room), permitted_actions(w)};
  return {std::move(w), std::move(obs)};
}

GroundTruth oracle_view(const WorldState& w) {
  GroundTruth gt;
  for (const auto& r : w.rooms) {
    GtRoom gr;
    gr.name = r.name;
    for (int di = 0; di < 4; ++di) {
      if (!r.exits[di]) continue;
      GtExit e;
      e.dir = static_cast<Dir>(di);
      e.to = w.rooms[r.exits[di]->to].name;
      if (r.exits[di]->door >= 0) {
        e.has_door = true;
        e.door_open = w.doors[r.exits[di]->door].open;
        e.door_style = w.doors[r.exits[di]->door].style;
      }
      gr.exits.push_back(e);
    }
    for (const auto& f : r.furniture) gr.furniture.push_back({f.name, f.kind, f.open});
    gt.rooms.push_back(std::move(gr));
  }
  for (const auto& it : w.items) {
    GtItem gi;
    gi.name = it.name;
    gi.kind = it.kind;
    gi.cut = it.cut;
    gi.cook = it.cook;
    if (it.loc.where == ItemLocation::Where::held) {
      gi.held = true;
    } else {
      gi.room = w.rooms[it.loc.room].name;
      if (it.loc.where == ItemLocation::Where::furniture) {
        const Furniture& f = w.rooms[it.loc.room].furniture[it.loc.furniture];
        gi.furniture = f.name;
        gi.hidden = f.kind == FurnitureKind::container && !f.open;
      }
    }
    if (it.kind == ItemKind::coin && !gi.held) gt.coin_room = gi.room;
    gt.items.push_back(std::move(gi));
  }
  gt.recipe = w.recipe;
  gt.agent_room = w.rooms[w.agent_room].name;
  gt.start_room = w.rooms[w.start_room].name;
  if (w.kitchen >= 0) gt.kitchen = w.rooms[w.kitchen].name;
  return gt;
}

}  // namespace planlab::envs
