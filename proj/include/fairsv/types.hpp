// Copyright 2026 The fairsv authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "fairsv/common.hpp"

namespace fairsv {

/// Demographic group of a speaker. The library is fixed at two groups.
enum class Group : std::uint8_t { G1, G2 };

inline const char* to_string(Group g) { return g == Group::G1 ? "g1" : "g2"; }

inline Group parse_group(std::string_view s) {
  if (s == "g1" || s == "G1") return Group::G1;
  if (s == "g2" || s == "G2") return Group::G2;
  fail("invalid group label '" + std::string(s) + "' (expected g1 or g2)");
}

enum class TrialLabel : std::uint8_t { Genuine, Impostor };

inline const char* to_string(TrialLabel l) {
  return l == TrialLabel::Genuine ? "genuine" : "impostor";
}

inline TrialLabel parse_trial_label(std::string_view s) {
  if (s == "genuine") return TrialLabel::Genuine;
  if (s == "impostor") return TrialLabel::Impostor;
  fail("invalid trial label '" + std::string(s) +
       "' (expected genuine or impostor)");
}

/// Group tag of a trial: both sides G1, both sides G2, or mixed.
enum class GroupTag : std::uint8_t { G1, G2, Cross };

inline const char* to_string(GroupTag t) {
  switch (t) {
    case GroupTag::G1: return "g1";
    case GroupTag::G2: return "g2";
    default: return "cross";
  }
}

inline GroupTag parse_group_tag(std::string_view s) {
  if (s == "g1") return GroupTag::G1;
  if (s == "g2") return GroupTag::G2;
  if (s == "cross") return GroupTag::Cross;
  fail("invalid group tag '" + std::string(s) + "'");
}

inline GroupTag tag_for(Group a, Group b) {
  if (a != b) return GroupTag::Cross;
  return a == Group::G1 ? GroupTag::G1 : GroupTag::G2;
}

/// One utterance: ids, demographic group and its embedding vector.
struct EmbeddingRecord {
  std::string utt_id;
  std::string speaker_id;
  Group group = Group::G1;
  std::vector<double> vector;
};

/// Enrolment-test pair with ground-truth label and group tag.
struct Trial {
  std::string enrol_utt;
  std::string test_utt;
  TrialLabel label = TrialLabel::Genuine;
  GroupTag group_tag = GroupTag::G1;

  friend bool operator==(const Trial&, const Trial&) = default;
};

struct ScoredTrial {
  Trial trial;
  double score = 0.0;
};

/// A validated collection of embedding records plus exact inverse indices.
struct DatasetSplit {
  std::vector<EmbeddingRecord> records;
  std::map<std::string, std::vector<std::string>> speaker_index;  // speaker -> utts
  std::map<Group, std::vector<std::string>> group_index;          // group -> speakers
  std::unordered_map<std::string, std::size_t> utt_lookup;        // utt -> record pos

  std::size_t dim() const {
    return records.empty() ? 0 : records.front().vector.size();
  }

  const EmbeddingRecord& by_utt(const std::string& utt_id) const {
    auto it = utt_lookup.find(utt_id);
    if (it == utt_lookup.end()) fail("unknown utterance id '" + utt_id + "'");
    return records[it->second];
  }
};

/// Validates records and builds the index structures. The thrown messages
/// reference records by position (0-based) since the caller may not have a
/// file context.
inline DatasetSplit make_split(std::vector<EmbeddingRecord> records) {
  DatasetSplit split;
  split.records = std::move(records);
  const std::size_t dim = split.records.empty()
                              ? 0
                              : split.records.front().vector.size();
  require(split.records.empty() || dim >= 1,
          "embedding dimension must be >= 1");
  for (std::size_t i = 0; i < split.records.size(); ++i) {
    const auto& r = split.records[i];
    require(!r.utt_id.empty(), "record " + std::to_string(i) + ": empty utt_id");
    require(!r.speaker_id.empty(),
            "record " + std::to_string(i) + ": empty speaker_id");
    require(r.vector.size() == dim,
            "record " + std::to_string(i) + " ('" + r.utt_id +
                "'): dimension " + std::to_string(r.vector.size()) +
                " != " + std::to_string(dim));
    for (double v : r.vector) {
      require(std::isfinite(v), "record " + std::to_string(i) + " ('" +
                                    r.utt_id + "'): non-finite value");
    }
    auto [_, inserted] = split.utt_lookup.emplace(r.utt_id, i);
    require(inserted, "duplicate utt_id '" + r.utt_id + "'");
  }
  for (const auto& r : split.records) {
    auto& utts = split.speaker_index[r.speaker_id];
    if (utts.empty()) split.group_index[r.group].push_back(r.speaker_id);
    utts.push_back(r.utt_id);
  }
  // A speaker must not appear under both groups.
  std::unordered_map<std::string, Group> seen;
  for (const auto& r : split.records) {
    auto it = seen.find(r.speaker_id);
    if (it == seen.end()) {
      seen.emplace(r.speaker_id, r.group);
    } else {
      require(it->second == r.group,
              "speaker '" + r.speaker_id + "' appears in both groups");
    }
  }
  return split;
}

/// Checks the Trial invariants against a split: label consistency with
/// speaker ids and group tag consistency with the utterance groups.
inline void validate_trial(const DatasetSplit& split, const Trial& t) {
  const auto& e = split.by_utt(t.enrol_utt);
  const auto& s = split.by_utt(t.test_utt);
  const bool same_speaker = e.speaker_id == s.speaker_id;
  if (t.label == TrialLabel::Genuine) {
    require(same_speaker, "genuine trial (" + t.enrol_utt + ", " + t.test_utt +
                              ") spans two speakers");
  } else {
    require(!same_speaker, "impostor trial (" + t.enrol_utt + ", " +
                               t.test_utt + ") is a same-speaker pair");
  }
  require(t.group_tag == tag_for(e.group, s.group),
          "trial (" + t.enrol_utt + ", " + t.test_utt +
              ") carries a group tag inconsistent with the records");
}

}  // namespace fairsv
