#include <catch2/catch_amalgamated.hpp>

#include <fstream>
#include <set>

#include "paratone/captions.hpp"

using namespace paratone;

namespace {

AttributeSpec random_spec(Rng& rng) {
  AttributeSpec spec;
  while (spec.empty()) {
    for (int a = 0; a < kNumAttributes; ++a) {
      if (rng.uniform() < 0.5) {
        spec.entries[a] = static_cast<Tercile>(rng.below(3));
      } else {
        spec.entries[a].reset();
      }
    }
    if (rng.uniform() < 0.5) {
      spec.emotion = static_cast<Emotion>(rng.below(kNumEmotions));
    } else {
      spec.emotion.reset();
    }
  }
  return spec;
}

}  // namespace

TEST_CASE("appendix single-clause captions") {
  Rng rng(1);
  AttributeSpec pitch_low;
  pitch_low.of(Attribute::PitchMean) = Tercile::Low;
  CHECK(generate_caption(pitch_low, rng) == "the speaker has a low pitch");

  AttributeSpec angry_jitter;
  angry_jitter.emotion = Emotion::Angry;
  angry_jitter.of(Attribute::Jitter) = Tercile::Top;
  CHECK(generate_caption(angry_jitter, rng) ==
        "speaker is angry and has a high jitter");

  AttributeSpec arousal_mid;
  arousal_mid.of(Attribute::Arousal) = Tercile::Mid;
  CHECK(generate_caption(arousal_mid, rng) == "arousal is at an average level");
}

TEST_CASE("empty spec refuses to render") {
  Rng rng(2);
  try {
    generate_caption(AttributeSpec{}, rng);
    FAIL("expected EmptySpec");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptySpec);
  }
}

TEST_CASE("level Top renders the loud synonym about half the time") {
  AttributeSpec spec;
  spec.of(Attribute::Level) = Tercile::Top;
  int loud = 0;
  const int n = 1000;
  Rng rng(3);
  for (int i = 0; i < n; ++i) {
    const std::string c = generate_caption(spec, rng);
    if (c == "the speaker is loud") {
      ++loud;
    } else {
      CHECK(c == "the speaker has a high equivalent sound level");
    }
    CHECK(parse_caption(c).of(Attribute::Level) == Tercile::Top);
  }
  CHECK(loud > 400);
  CHECK(loud < 600);
}

TEST_CASE("parser handles appendix clauses and synonyms") {
  AttributeSpec s = parse_caption("the speaker has a high pitch variation");
  CHECK(s.of(Attribute::PitchStd) == Tercile::Top);
  CHECK(s.size() == 1);

  s = parse_caption("is loud");
  CHECK(s.of(Attribute::Level) == Tercile::Top);

  s = parse_caption("the speaker is silent");
  CHECK(s.of(Attribute::Level) == Tercile::Low);

  s = parse_caption("loudness is just right");
  CHECK(s.of(Attribute::Level) == Tercile::Mid);

  s = parse_caption("Speaker is SURPRISE and has a low shimmer");
  CHECK(s.emotion == Emotion::Surprise);
  CHECK(s.of(Attribute::Shimmer) == Tercile::Low);

  // Comma splitting.
  s = parse_caption("has a low pitch, has a high jitter");
  CHECK(s.of(Attribute::PitchMean) == Tercile::Low);
  CHECK(s.of(Attribute::Jitter) == Tercile::Top);
}

TEST_CASE("parser typed errors") {
  try {
    parse_caption("the speaker purrs melodically");
    FAIL("expected UnrecognizedClause");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnrecognizedClause);
  }
  try {
    parse_caption("");
    FAIL("expected EmptyCaption");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptyCaption);
  }
  try {
    parse_caption("is loud and has a low equivalent sound level");
    FAIL("expected DuplicateAttribute");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DuplicateAttribute);
  }
  try {
    parse_caption("speaker is angry and speaker is sad");
    FAIL("expected DuplicateAttribute");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DuplicateAttribute);
  }
  try {
    parse_caption("speaker is furious");
    FAIL("expected UnrecognizedClause");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnrecognizedClause);
  }
}

TEST_CASE("round trip over the full spec grammar") {
  Rng spec_rng(1234);
  for (int i = 0; i < 1500; ++i) {
    const AttributeSpec spec = random_spec(spec_rng);
    Rng caption_rng(derive_seed(99, i));
    const std::string caption = generate_caption(spec, caption_rng);
    const AttributeSpec back = parse_caption(caption);
    REQUIRE(back == spec);
  }
}

TEST_CASE("eval caption sets") {
  const auto single = eval_caption_set("single");
  REQUIRE(single.size() == 18);
  std::set<std::string> texts;
  for (const auto& ec : single) {
    texts.insert(ec.text);
    const AttributeSpec parsed = parse_caption(ec.text);
    CHECK(parsed == ec.spec);
    CHECK(parsed.size() == 1);
    CHECK_FALSE(parsed.emotion.has_value());
  }
  CHECK(texts.size() == 18);

  const auto paper44 = eval_caption_set("paper44");
  REQUIRE(paper44.size() == 44);
  std::set<std::string> texts44;
  for (const auto& ec : paper44) {
    texts44.insert(ec.text);
    CHECK(parse_caption(ec.text) == ec.spec);
  }
  CHECK(texts44.size() == 44);

  // Deterministic: a second call gives the identical list.
  const auto again = eval_caption_set("paper44");
  for (std::size_t i = 0; i < again.size(); ++i) {
    CHECK(again[i].text == paper44[i].text);
  }

  // The 26 pair captions each parse to exactly two attributes.
  for (std::size_t i = 18; i < paper44.size(); ++i) {
    CHECK(paper44[i].spec.size() == 2);
  }
}

TEST_CASE("shipped template table matches the built-in default") {
  std::ifstream f(std::string(PARATONE_SOURCE_DIR) + "/data/templates.json");
  REQUIRE(f.good());
  nlohmann::json j;
  f >> j;
  const TemplateTable loaded = template_table_from_json(j);
  const TemplateTable def = default_template_table();
  for (Attribute a : kAllAttributes) {
    for (int k = 0; k < 3; ++k) {
      CHECK(loaded.canonical[static_cast<int>(a)][k].text ==
            def.canonical[static_cast<int>(a)][k].text);
      CHECK(loaded.canonical[static_cast<int>(a)][k].has_subject ==
            def.canonical[static_cast<int>(a)][k].has_subject);
    }
  }
  REQUIRE(loaded.synonyms.size() == def.synonyms.size());
  CHECK(loaded.loud_synonym == def.loud_synonym);
}

TEST_CASE("spec json round trip") {
  Rng rng(5);
  for (int i = 0; i < 100; ++i) {
    const AttributeSpec spec = random_spec(rng);
    CHECK(spec_from_json(spec_to_json(spec)) == spec);
  }
}
