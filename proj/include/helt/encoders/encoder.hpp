#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "helt/game/state.hpp"

namespace helt::enc {

// FIS: ids + attributes for self and opponent.
// QS:  ids + attributes for self, attributes only for the opponent.
// FQS: attributes only.
enum class EncoderMode : std::uint8_t { kFIS, kQS, kFQS };

std::string_view to_string(EncoderMode mode);
EncoderMode mode_from_string(std::string_view text);

inline constexpr int kSchemaVersion = 1;

// Maps character ids of the training subset to embedding rows. Row 0 is
// reserved for characters outside the table.
class IdTable {
 public:
  IdTable() = default;
  explicit IdTable(const std::vector<int>& char_ids);

  int char_index(int char_id) const;
  // Row in the skill table for the given character's slot.
  int skill_index(int char_id, game::SkillSlot slot) const;

  int char_table_size() const { return static_cast<int>(ids_.size()) + 1; }
  int skill_table_size() const { return char_table_size() * game::kNumSkillSlots; }
  const std::vector<int>& char_ids() const { return ids_; }

  friend bool operator==(const IdTable& a, const IdTable& b) { return a.ids_ == b.ids_; }

 private:
  std::vector<int> ids_;
  std::unordered_map<int, int> index_;
};

struct IdPair {
  int character = 0;
  int skill = 0;
  friend bool operator==(const IdPair&, const IdPair&) = default;
};

struct Observation {
  std::optional<IdPair> self_id;
  std::vector<double> self_attr;
  std::optional<IdPair> opp_id;
  std::vector<double> opp_attr;
  std::vector<double> env;

  friend bool operator==(const Observation&, const Observation&) = default;

  // self_attr ++ opp_attr ++ env.
  std::vector<double> numeric() const;
  void numeric_into(double* out) const;
  int numeric_size() const { return static_cast<int>(self_attr.size() + opp_attr.size() + env.size()); }
  // Present ids in network order: self char, self skill, opp char, opp skill.
  std::vector<int> id_indices() const;
};

// Attribute block sizes. The "core" block is shared by self and opponent.
inline constexpr int kCoreDim = 23 + game::kNumSkills * 4;
inline constexpr int kSelfAttrDim = kCoreDim;
inline constexpr int kOppAttrDim = kCoreDim + 7;
inline constexpr int kEnvDim = 7 + 2 * game::kNumSkills + 4;
inline constexpr int kNumericDim = kSelfAttrDim + kOppAttrDim + kEnvDim;

struct EncoderConfig {
  int embedding_width = 8;
  friend bool operator==(const EncoderConfig&, const EncoderConfig&) = default;
};

int num_id_slots(EncoderMode mode);

Observation encode(const game::GameState& state, game::Side player, EncoderMode mode, const IdTable& ids);

// Width of the network input after embedding lookup and concatenation.
int feature_dim(EncoderMode mode, int char_table_size, int skill_table_size, const EncoderConfig& cfg = {});

struct FeatureField {
  std::string block;
  std::string name;
  double lo;
  double hi;
};

// Ordered description of every numeric feature with its declared interval.
const std::vector<FeatureField>& numeric_schema();
std::string schema_json(EncoderMode mode, const IdTable& ids, const EncoderConfig& cfg = {});

}  // namespace helt::enc
