// Template captions: AttributeSpec <-> caption text, plus the fixed
// evaluation caption sets. The clause table mirrors data/templates.json;
// a consistency test keeps the two in sync.
#pragma once

#include <array>
#include <cctype>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "paratone/binning.hpp"
#include "paratone/error.hpp"
#include "paratone/rng.hpp"

namespace paratone {

enum class Emotion { Neutral = 0, Happy, Angry, Sad, Surprise };

inline constexpr int kNumEmotions = 5;

inline const char* emotion_name(Emotion e) {
  switch (e) {
    case Emotion::Neutral: return "neutral";
    case Emotion::Happy: return "happy";
    case Emotion::Angry: return "angry";
    case Emotion::Sad: return "sad";
    case Emotion::Surprise: return "surprise";
  }
  return "?";
}

inline std::optional<Emotion> emotion_from_name(const std::string& s) {
  for (int i = 0; i < kNumEmotions; ++i) {
    if (s == emotion_name(static_cast<Emotion>(i))) {
      return static_cast<Emotion>(i);
    }
  }
  return std::nullopt;
}

struct AttributeSpec {
  std::array<std::optional<Tercile>, kNumAttributes> entries{};
  std::optional<Emotion> emotion;

  bool empty() const {
    if (emotion) return false;
    for (const auto& e : entries)
      if (e) return false;
    return true;
  }

  std::size_t size() const {
    std::size_t n = emotion ? 1 : 0;
    for (const auto& e : entries) n += e ? 1 : 0;
    return n;
  }

  std::optional<Tercile>& of(Attribute a) {
    return entries[static_cast<int>(a)];
  }
  const std::optional<Tercile>& of(Attribute a) const {
    return entries[static_cast<int>(a)];
  }

  bool operator==(const AttributeSpec& other) const {
    return entries == other.entries && emotion == other.emotion;
  }

  // Compact display form, e.g. {emotion: angry, level: Top}.
  std::string display() const {
    std::string out = "{";
    bool first = true;
    auto add = [&](const std::string& k, const std::string& v) {
      if (!first) out += ", ";
      out += k + ": " + v;
      first = false;
    };
    if (emotion) add("emotion", emotion_name(*emotion));
    for (Attribute a : kAllAttributes) {
      if (of(a)) add(attribute_spec_key(a), tercile_name(*of(a)));
    }
    out += "}";
    return out;
  }
};

inline nlohmann::json spec_to_json(const AttributeSpec& spec) {
  nlohmann::json j = nlohmann::json::object();
  for (Attribute a : kAllAttributes) {
    if (spec.of(a)) j[attribute_spec_key(a)] = tercile_name(*spec.of(a));
  }
  if (spec.emotion) j["emotion"] = emotion_name(*spec.emotion);
  return j;
}

inline AttributeSpec spec_from_json(const nlohmann::json& j) {
  AttributeSpec spec;
  for (const auto& [key, value] : j.items()) {
    if (key == "emotion") {
      const auto e = emotion_from_name(value.get<std::string>());
      if (!e) raise(ErrorCode::UnknownAttribute, "unknown emotion: " +
                                                     value.get<std::string>());
      spec.emotion = e;
      continue;
    }
    bool matched = false;
    for (Attribute a : kAllAttributes) {
      if (key == attribute_spec_key(a)) {
        spec.of(a) = tercile_from_name(value.get<std::string>());
        matched = true;
        break;
      }
    }
    if (!matched) raise(ErrorCode::UnknownAttribute, "unknown attribute: " + key);
  }
  return spec;
}

struct TemplateClause {
  std::string text;
  bool has_subject = false;  // clause carries its own grammatical subject
};

struct TemplateTable {
  // canonical[attribute][tercile]
  std::array<std::array<TemplateClause, 3>, kNumAttributes> canonical{};
  // accepted synonym clause -> (attribute, tercile)
  std::vector<std::pair<std::string, std::pair<Attribute, Tercile>>> synonyms;
  // generation-time synonym for level=Top, used with probability 0.5
  std::string loud_synonym = "is loud";

  const TemplateClause& clause(Attribute a, Tercile t) const {
    return canonical[static_cast<int>(a)][static_cast<int>(t)];
  }
};

inline TemplateTable default_template_table() {
  TemplateTable t;
  auto set = [&](Attribute a, const char* low, const char* mid,
                 const char* top, bool mid_has_subject = false) {
    t.canonical[static_cast<int>(a)][0] = {low, false};
    t.canonical[static_cast<int>(a)][1] = {mid, mid_has_subject};
    t.canonical[static_cast<int>(a)][2] = {top, false};
  };
  set(Attribute::PitchMean, "has a low pitch", "has an average pitch",
      "has a high pitch");
  set(Attribute::PitchStd, "has a low pitch variation",
      "has a normal pitch variation", "has a high pitch variation");
  set(Attribute::Level, "has a low equivalent sound level",
      "has a normal equivalent sound level",
      "has a high equivalent sound level");
  set(Attribute::Jitter, "has a low jitter", "has a normal jitter",
      "has a high jitter");
  set(Attribute::Shimmer, "has a low shimmer", "has a normal shimmer",
      "has a high shimmer");
  set(Attribute::Arousal, "has low arousal", "arousal is at an average level",
      "has high arousal", true);
  set(Attribute::Valence, "has low valence", "valence is at an average level",
      "has high valence", true);
  set(Attribute::Dominance, "has low dominance",
      "dominance is at an average level", "has high dominance", true);
  t.synonyms = {
      {"is loud", {Attribute::Level, Tercile::Top}},
      {"is silent", {Attribute::Level, Tercile::Low}},
      {"loudness is just right", {Attribute::Level, Tercile::Mid}},
  };
  return t;
}

inline nlohmann::json template_table_to_json(const TemplateTable& t) {
  nlohmann::json rows = nlohmann::json::array();
  for (Attribute a : kAllAttributes) {
    nlohmann::json row;
    row["attribute"] = attribute_spec_key(a);
    for (int k = 0; k < 3; ++k) {
      const auto& c = t.canonical[static_cast<int>(a)][k];
      nlohmann::json cj;
      cj["text"] = c.text;
      cj["has_subject"] = c.has_subject;
      row[tercile_name(static_cast<Tercile>(k))] = cj;
    }
    rows.push_back(row);
  }
  nlohmann::json syn = nlohmann::json::array();
  for (const auto& [text, target] : t.synonyms) {
    nlohmann::json sj;
    sj["text"] = text;
    sj["attribute"] = attribute_spec_key(target.first);
    sj["tercile"] = tercile_name(target.second);
    syn.push_back(sj);
  }
  nlohmann::json j;
  j["clauses"] = rows;
  j["synonyms"] = syn;
  j["loud_synonym"] = t.loud_synonym;
  return j;
}

inline TemplateTable template_table_from_json(const nlohmann::json& j) {
  TemplateTable t;
  for (const auto& row : j.at("clauses")) {
    const std::string key = row.at("attribute").get<std::string>();
    std::optional<Attribute> attr;
    for (Attribute a : kAllAttributes) {
      if (key == attribute_spec_key(a)) attr = a;
    }
    if (!attr) raise(ErrorCode::UnknownAttribute, "unknown attribute: " + key);
    for (int k = 0; k < 3; ++k) {
      const auto& cj = row.at(tercile_name(static_cast<Tercile>(k)));
      t.canonical[static_cast<int>(*attr)][k] = {
          cj.at("text").get<std::string>(), cj.at("has_subject").get<bool>()};
    }
  }
  for (const auto& sj : j.at("synonyms")) {
    const std::string key = sj.at("attribute").get<std::string>();
    std::optional<Attribute> attr;
    for (Attribute a : kAllAttributes) {
      if (key == attribute_spec_key(a)) attr = a;
    }
    if (!attr) raise(ErrorCode::UnknownAttribute, "unknown attribute: " + key);
    t.synonyms.emplace_back(
        sj.at("text").get<std::string>(),
        std::make_pair(*attr,
                       tercile_from_name(sj.at("tercile").get<std::string>())));
  }
  t.loud_synonym = j.at("loud_synonym").get<std::string>();
  return t;
}

namespace detail {

inline std::string lowercase_collapse(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  bool prev_space = true;
  for (char c : s) {
    const char lc = static_cast<char>(
        std::tolower(static_cast<unsigned char>(c)));
    if (lc == ' ' || lc == '\t' || lc == '\n' || lc == '\r') {
      if (!prev_space) out.push_back(' ');
      prev_space = true;
    } else {
      out.push_back(lc);
      prev_space = false;
    }
  }
  while (!out.empty() && out.back() == ' ') out.pop_back();
  return out;
}

inline bool strip_prefix(std::string& s, const std::string& prefix) {
  if (s.rfind(prefix, 0) == 0) {
    s = s.substr(prefix.size());
    return true;
  }
  return false;
}

}  // namespace detail

// Render a caption. Clauses come out in fixed order (emotion first, then
// pitch_mean, pitch_std, level, jitter, shimmer, arousal, valence,
// dominance), joined by " and ". "the speaker" is prepended when the first
// clause has no subject of its own. level=Top renders "is loud" with
// probability 0.5.
inline std::string generate_caption(const AttributeSpec& spec, Rng& rng,
                                    const TemplateTable& table =
                                        default_template_table()) {
  if (spec.empty()) raise(ErrorCode::EmptySpec, "no attributes, no emotion");
  std::vector<TemplateClause> clauses;
  if (spec.emotion) {
    clauses.push_back(
        {"speaker is " + std::string(emotion_name(*spec.emotion)), true});
  }
  for (Attribute a : kAllAttributes) {
    if (!spec.of(a)) continue;
    TemplateClause c = table.clause(a, *spec.of(a));
    if (a == Attribute::Level && *spec.of(a) == Tercile::Top &&
        rng.uniform() < 0.5) {
      c = {table.loud_synonym, false};
    }
    clauses.push_back(c);
  }
  std::string out;
  for (std::size_t i = 0; i < clauses.size(); ++i) {
    if (i > 0) out += " and ";
    out += clauses[i].text;
  }
  if (!clauses.front().has_subject) out = "the speaker " + out;
  return out;
}

// Deterministic rendering without the synonym coin flip (evaluation sets).
inline std::string render_canonical_caption(const AttributeSpec& spec,
                                            const TemplateTable& table =
                                                default_template_table()) {
  if (spec.empty()) raise(ErrorCode::EmptySpec, "no attributes, no emotion");
  std::vector<TemplateClause> clauses;
  if (spec.emotion) {
    clauses.push_back(
        {"speaker is " + std::string(emotion_name(*spec.emotion)), true});
  }
  for (Attribute a : kAllAttributes) {
    if (spec.of(a)) clauses.push_back(table.clause(a, *spec.of(a)));
  }
  std::string out;
  for (std::size_t i = 0; i < clauses.size(); ++i) {
    if (i > 0) out += " and ";
    out += clauses[i].text;
  }
  if (!clauses.front().has_subject) out = "the speaker " + out;
  return out;
}

inline AttributeSpec parse_caption(const std::string& text,
                                   const TemplateTable& table =
                                       default_template_table()) {
  const std::string norm = detail::lowercase_collapse(text);
  if (norm.empty()) raise(ErrorCode::EmptyCaption, "empty caption");

  // Split on " and " and ",".
  std::vector<std::string> raw_clauses;
  std::size_t pos = 0;
  while (pos < norm.size()) {
    std::size_t and_pos = norm.find(" and ", pos);
    std::size_t comma_pos = norm.find(',', pos);
    std::size_t cut = std::min(and_pos, comma_pos);
    if (cut == std::string::npos) {
      raw_clauses.push_back(norm.substr(pos));
      break;
    }
    raw_clauses.push_back(norm.substr(pos, cut - pos));
    pos = cut + (cut == and_pos ? 5 : 1);
  }

  // Clause lookup: canonical texts plus synonyms.
  std::map<std::string, std::pair<Attribute, Tercile>> lookup;
  for (Attribute a : kAllAttributes) {
    for (int k = 0; k < 3; ++k) {
      lookup[detail::lowercase_collapse(
          table.canonical[static_cast<int>(a)][k].text)] = {
          a, static_cast<Tercile>(k)};
    }
  }
  for (const auto& [syn, target] : table.synonyms) {
    lookup[detail::lowercase_collapse(syn)] = target;
  }

  AttributeSpec spec;
  for (std::string clause : raw_clauses) {
    // Trim.
    while (!clause.empty() && clause.front() == ' ') clause.erase(0, 1);
    while (!clause.empty() && clause.back() == ' ') clause.pop_back();
    if (clause.empty()) continue;
    std::string stripped = clause;
    detail::strip_prefix(stripped, "the ");
    std::string no_speaker = stripped;
    const bool had_speaker = detail::strip_prefix(no_speaker, "speaker ");

    bool matched = false;
    for (const std::string* cand : {&clause, &stripped, &no_speaker}) {
      const auto it = lookup.find(*cand);
      if (it != lookup.end()) {
        const auto [attr, terc] = it->second;
        if (spec.of(attr)) {
          raise(ErrorCode::DuplicateAttribute,
                std::string(attribute_spec_key(attr)) + " appears twice");
        }
        spec.of(attr) = terc;
        matched = true;
        break;
      }
    }
    if (!matched && had_speaker) {
      std::string rest = no_speaker;
      if (detail::strip_prefix(rest, "is ")) {
        if (const auto e = emotion_from_name(rest)) {
          if (spec.emotion) {
            raise(ErrorCode::DuplicateAttribute, "emotion appears twice");
          }
          spec.emotion = e;
          matched = true;
        }
      }
    }
    if (!matched) {
      raise(ErrorCode::UnrecognizedClause, "\"" + clause + "\"");
    }
  }
  if (spec.empty()) raise(ErrorCode::EmptyCaption, "caption had no clauses");
  return spec;
}

inline constexpr std::array<Attribute, kNumControllable> kControllable = {
    Attribute::PitchMean, Attribute::PitchStd, Attribute::Level,
    Attribute::Jitter, Attribute::Shimmer};

struct EvalCaption {
  std::string text;
  AttributeSpec spec;
};

// mode "single": 15 canonical single-attribute captions over the five
// controllable attributes, plus the three loudness synonym variants (18).
// mode "paper44": those 18 plus 26 two-attribute combinations in
// lexicographic order, 44 total.
inline std::vector<EvalCaption> eval_caption_set(
    const std::string& mode,
    const TemplateTable& table = default_template_table()) {
  if (mode != "single" && mode != "paper44") {
    raise(ErrorCode::InvalidParams, "mode must be single or paper44");
  }
  std::vector<EvalCaption> out;
  for (Attribute a : kControllable) {
    for (int k = 0; k < 3; ++k) {
      AttributeSpec spec;
      spec.of(a) = static_cast<Tercile>(k);
      out.push_back({render_canonical_caption(spec, table), spec});
    }
  }
  // Loudness synonyms in tercile order: silent, just right, loud.
  {
    AttributeSpec low;
    low.of(Attribute::Level) = Tercile::Low;
    out.push_back({"the speaker is silent", low});
    AttributeSpec mid;
    mid.of(Attribute::Level) = Tercile::Mid;
    out.push_back({"loudness is just right", mid});
    AttributeSpec top;
    top.of(Attribute::Level) = Tercile::Top;
    out.push_back({"the speaker is loud", top});
  }
  if (mode == "single") return out;

  int remaining = 26;
  for (std::size_t i = 0; i < kControllable.size() && remaining > 0; ++i) {
    for (std::size_t j = i + 1; j < kControllable.size() && remaining > 0;
         ++j) {
      for (int ta = 0; ta < 3 && remaining > 0; ++ta) {
        for (int tb = 0; tb < 3 && remaining > 0; ++tb) {
          AttributeSpec spec;
          spec.of(kControllable[i]) = static_cast<Tercile>(ta);
          spec.of(kControllable[j]) = static_cast<Tercile>(tb);
          out.push_back({render_canonical_caption(spec, table), spec});
          --remaining;
        }
      }
    }
  }
  return out;
}

}  // namespace paratone
