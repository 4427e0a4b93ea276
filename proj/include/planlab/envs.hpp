// Deterministic, seeded reimplementations of the two partially-observed text
// games: Coin Collector (navigation, closed doors, find the coin) and Cooking
// World (gather recipe ingredients, process them, prepare and eat the meal).
#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "planlab/util.hpp"

namespace planlab::envs {

enum class Kind { coin, cooking };
enum class Difficulty { none, easy, hard };

// Seed with a hand-built world that reproduces the showcase cooking-hard
// walkthrough (kitchen / corridor / pantry / bedroom / backyard).
inline constexpr uint64_t kCookingFixtureSeed = 0;

struct EnvConfig {
  Kind kind = Kind::coin;
  Difficulty difficulty = Difficulty::none;  // cooking only
  int num_rooms = 0;                         // 0 = kind/difficulty default
  int num_ingredients = 0;                   // 0 = default (cooking only)
  uint64_t seed = 1;
  int max_steps = 50;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EpisodeFinished : public std::logic_error {
 public:
  EpisodeFinished() : std::logic_error("step after terminal state") {}
};

enum class Dir { north = 0, east = 1, south = 2, west = 3 };
Dir opposite(Dir d);
const char* dir_name(Dir d);                 // "north"
std::optional<Dir> dir_from_name(const std::string& s);

enum class CutState { none, sliced, diced, chopped };
enum class CookState { none, fried, roasted, grilled };
const char* cut_name(CutState c);            // "sliced"
const char* cook_name(CookState c);          // "grilled"
const char* cut_verb(CutState c);            // "slice"
const char* cook_verb(CookState c);          // "grill"

struct Door {
  std::string style;  // "plain door", "wood door", ...
  bool open = false;
};

struct Exit {
  int to = -1;       // room index
  int door = -1;     // index into WorldState::doors, -1 = open passage
};

enum class FurnitureKind { surface, container, appliance };

struct Furniture {
  std::string name;
  FurnitureKind kind = FurnitureKind::surface;
  bool open = false;  // containers only
};

enum class ItemKind { coin, knife, cookbook, ingredient, meal, distractor };

// Where an item sits: held by the agent, on the floor of a room, or on/in a
// piece of furniture of a room.
struct ItemLocation {
  enum class Where { held, floor, furniture } where = Where::floor;
  int room = -1;
  int furniture = -1;
};

struct Item {
  std::string name;       // game text name, e.g. "block of cheese"
  ItemKind kind = ItemKind::ingredient;
  bool mass_noun = false; // "some salt" vs "a red apple"
  ItemLocation loc;
  CutState cut = CutState::none;
  CookState cook = CookState::none;
};

struct RecipeEntry {
  std::string ingredient;
  CutState cut_req = CutState::none;
  CookState cook_req = CookState::none;
};

struct Recipe {
  std::vector<RecipeEntry> entries;
  const RecipeEntry* find(const std::string& name) const;
};

struct Room {
  std::string name;
  int x = 0, y = 0;  // grid cell, for exit symmetry
  std::array<std::optional<Exit>, 4> exits;  // indexed by Dir
  std::vector<Furniture> furniture;
};

enum class EpisodeStatus { running, won, lost };

struct WorldState {
  EnvConfig cfg;
  std::vector<Room> rooms;
  std::vector<Door> doors;
  std::vector<Item> items;
  Recipe recipe;       // cooking only
  int agent_room = 0;
  int start_room = 0;
  int kitchen = -1;    // cooking only
  int steps = 0;
  EpisodeStatus status = EpisodeStatus::running;
  std::string end_reason;

  const Room& here() const { return rooms[agent_room]; }
  int room_index(const std::string& name) const;
  const Item* find_item(const std::string& name) const;
};

struct Observation {
  std::string text;
  std::vector<std::string> permitted_actions;
};

struct StepOutcome {
  enum class Kind { ok, invalid, won, lost } kind = Kind::ok;
  std::string reason;  // set for invalid/lost

  bool terminal() const { return kind == Kind::won || kind == Kind::lost; }
};

const char* outcome_name(StepOutcome::Kind k);

std::pair<WorldState, Observation> new_episode(const EnvConfig& cfg);

struct StepResult {
  Observation obs;
  StepOutcome outcome;
};

// Advances the world. Invalid actions never mutate anything except the step
// counter. Throws EpisodeFinished after a terminal step.
StepResult step(WorldState& w, const std::string& action);

// Full room description, as produced by entering the room or `look around`.
std::string describe_room(const WorldState& w, int room);
std::string recipe_text(const Recipe& r);
std::vector<std::string> permitted_actions(const WorldState& w);

// ------------------------------------------------------------ oracle view --

struct GtExit {
  Dir dir;
  std::string to;
  bool has_door = false;
  bool door_open = false;
  std::string door_style;
};

struct GtItem {
  std::string name;
  ItemKind kind;
  bool held = false;
  std::string room;        // empty when held
  std::string furniture;   // empty when on the floor / held
  bool hidden = false;     // inside a closed container
  CutState cut = CutState::none;
  CookState cook = CookState::none;
};

struct GtFurniture {
  std::string name;
  FurnitureKind kind;
  bool open = false;
};

struct GtRoom {
  std::string name;
  std::vector<GtExit> exits;
  std::vector<GtFurniture> furniture;
};

// Complete, read-only snapshot. Available to the oracle policy and tests,
// never to LLM policies.
struct GroundTruth {
  std::vector<GtRoom> rooms;
  std::vector<GtItem> items;
  Recipe recipe;
  std::string agent_room;
  std::string start_room;
  std::string kitchen;  // empty for coin
  std::string coin_room;  // empty once taken / for cooking
};

GroundTruth oracle_view(const WorldState& w);

// ------------------------------------------------------------ PDDL export --

// The bundled hand-written domain files, embedded so library users never
// depend on an assets path. assets/domains/*.pddl mirror these texts.
const std::string& coin_domain_text();
const std::string& cooking_domain_text();
const std::string& domain_text(Kind k);

// Gold problem file for the full (oracle-view) world. Pairs with
// domain_text(kind) to form the exported DF+PF instance.
std::string export_problem(const WorldState& w);

}  // namespace planlab::envs
