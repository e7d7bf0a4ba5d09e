// Copyright 2026 The sdekit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Synthetic review corpus generator.
//
// Labels: for every aspect, the number of records carrying each label is
// fixed by randomized systematic rounding of n * fraction (error < 1 record
// per label), and the label column is then shuffled independently per aspect.
// Text: one sentence per mentioned aspect drawn from a small English template
// bank keyed by label, behind an opener sentence.
//
// Only std::mt19937_64 raw output is consumed (its sequence is fixed by the
// standard); no std::*_distribution, whose algorithms vary across libraries.

#include <array>
#include <cmath>
#include <random>
#include <string>

#include "sdekit/errors.hpp"
#include "sdekit/schema.hpp"
#include "text_util.hpp"

namespace sde {

namespace {

constexpr std::array<std::string_view, 4> kOpeners = {
    "We came here for dinner last weekend.",
    "Stopped by with a few friends after work.",
    "This was our second visit this month.",
    "Came in for a quick lunch on a weekday.",
};

// Indexed by label_index() for the three sentiment labels.
constexpr std::array<std::array<std::string_view, 4>, 3> kSentences = {{
    {"The {a} was excellent.", "I really liked the {a}.",
     "The {a} exceeded our expectations.", "Great {a}, no complaints at all."},
    {"The {a} was okay, nothing special.", "The {a} was average.",
     "Nothing remarkable about the {a} either way.",
     "The {a} was acceptable."},
    {"The {a} was disappointing.", "I did not like the {a} at all.",
     "The {a} was a real letdown.", "Honestly the {a} was poor."},
}};

constexpr std::array<std::string_view, 3> kRationales = {
    "The reviewer praises the {a}: \"{s}\"",
    "The reviewer describes the {a} without praise or complaint: \"{s}\"",
    "The reviewer complains about the {a}: \"{s}\"",
};

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform in [0, 1) with 53 random bits.
  double unit() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  std::size_t below(std::size_t n) {
    return static_cast<std::size_t>(engine_() % n);
  }

 private:
  std::mt19937_64 engine_;
};

std::string display_name(std::string_view aspect) {
  std::string out(aspect);
  for (char& c : out) {
    if (c == '_') c = ' ';
  }
  return out;
}

// Exact per-label counts summing to n; each count is within 1 of n * f.
std::array<std::size_t, 4> label_counts(const std::array<double, 4>& f,
                                        std::size_t n, double offset) {
  std::array<std::size_t, 4> counts{};
  double cumulative = 0.0;
  std::size_t previous = 0;
  for (std::size_t k = 0; k < 4; ++k) {
    cumulative += f[k];
    std::size_t upto =
        k == 3 ? n
               : static_cast<std::size_t>(std::floor(static_cast<double>(n) * cumulative + offset));
    if (upto > n) upto = n;
    if (upto < previous) upto = previous;
    counts[k] = upto - previous;
    previous = upto;
  }
  return counts;
}

}  // namespace

std::vector<MasaRecord> generate_fixture_corpus(const AspectSchema& schema,
                                                const LabelDistribution& dist,
                                                std::size_t n,
                                                std::uint64_t seed) {
  if (n == 0) throw ValidationError("fixture corpus size must be at least 1");
  if (auto problems = validate_schema(schema); !problems.empty()) {
    throw ValidationError("invalid schema: " + text::join(problems, "; "));
  }
  if (auto problems = validate_distribution(dist); !problems.empty()) {
    throw ValidationError("invalid distribution: " + text::join(problems, "; "));
  }
  for (const auto& a : schema.aspects) {
    if (!dist.find(a)) {
      throw ValidationError("distribution has no entry for aspect '" + a + "'");
    }
  }

  Rng rng(seed);
  const std::size_t n_aspects = schema.aspects.size();

  // columns[a][i] = label of aspect a in record i
  std::vector<std::vector<SentimentLabel>> columns(n_aspects);
  for (std::size_t a = 0; a < n_aspects; ++a) {
    const auto counts = label_counts(*dist.find(schema.aspects[a]), n, rng.unit());
    auto& col = columns[a];
    col.reserve(n);
    for (SentimentLabel l : kAllLabels) col.insert(col.end(), counts[label_index(l)], l);
    for (std::size_t i = n - 1; i > 0; --i) std::swap(col[i], col[rng.below(i + 1)]);
  }

  std::vector<MasaRecord> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    MasaRecord r;
    r.id = "r" + std::to_string(i + 1);
    r.text = std::string(kOpeners[rng.below(kOpeners.size())]);
    std::vector<AspectText> rationales;
    for (std::size_t a = 0; a < n_aspects; ++a) {
      const std::string& aspect = schema.aspects[a];
      const SentimentLabel label = columns[a][i];
      r.labels.push_back({aspect, label});
      if (label == SentimentLabel::Unmentioned) continue;
      const auto& bank = kSentences[label_index(label)];
      const std::string name = display_name(aspect);
      std::string sentence = text::replace_all(
          std::string(bank[rng.below(bank.size())]), "{a}", name);
      r.text += ' ';
      r.text += sentence;
      std::string why = text::replace_all(
          std::string(kRationales[label_index(label)]), "{a}", name);
      rationales.push_back({aspect, text::replace_all(why, "{s}", sentence)});
    }
    r.rationales = std::move(rationales);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace sde
