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

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "fairsv/common.hpp"
#include "fairsv/types.hpp"

// CSV file formats.
//
//   embeddings: utt_id,speaker_id,group,e0,...,e{D-1}
//   trials:     enrol_utt,test_utt,label,group_tag
//   scores:     enrol_utt,test_utt,label,group_tag,score
//
// Reals are written with 17 significant digits so that save -> load is an
// exact 64-bit round-trip. Fields must not contain commas; ids are plain
// tokens in practice so no quoting is implemented.

namespace fairsv {

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  return fields;
}

inline std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open '" + path.string() + "' for reading");
  return in;
}

inline std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) fail("cannot open '" + path.string() + "' for writing");
  return out;
}

}  // namespace detail

/// Loads and validates an embedding CSV. The dimension D is inferred from
/// the header; every data problem is reported with its 1-based line number.
inline DatasetSplit load_embeddings(const std::filesystem::path& path) {
  auto in = detail::open_input(path);
  std::string line;
  if (!std::getline(in, line)) fail(path.string() + ": empty file");
  auto header = detail::split_csv_line(line);
  require(header.size() >= 4 && header[0] == "utt_id" &&
              header[1] == "speaker_id" && header[2] == "group",
          path.string() +
              ": bad header (expected utt_id,speaker_id,group,e0,...)");
  const std::size_t dim = header.size() - 3;

  std::vector<EmbeddingRecord> records;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto fields = detail::split_csv_line(line);
    const std::string where = path.string() + ":" + std::to_string(lineno);
    require(fields.size() == dim + 3,
            where + ": expected " + std::to_string(dim + 3) + " fields, got " +
                std::to_string(fields.size()));
    EmbeddingRecord rec;
    rec.utt_id = fields[0];
    rec.speaker_id = fields[1];
    try {
      rec.group = parse_group(fields[2]);
    } catch (const Error& e) {
      fail(where + ": " + e.what());
    }
    rec.vector.resize(dim);
    for (std::size_t j = 0; j < dim; ++j) {
      bool ok = false;
      rec.vector[j] = parse_real(fields[3 + j], &ok);
      require(ok, where + ": field '" + fields[3 + j] + "' is not a number");
      require(std::isfinite(rec.vector[j]),
              where + ": non-finite value in column e" + std::to_string(j));
    }
    records.push_back(std::move(rec));
  }
  try {
    return make_split(std::move(records));
  } catch (const Error& e) {
    fail(path.string() + ": " + e.what());
  }
}

inline void save_embeddings(const DatasetSplit& split,
                            const std::filesystem::path& path) {
  auto out = detail::open_output(path);
  const std::size_t dim = split.dim();
  out << "utt_id,speaker_id,group";
  // An empty split still gets one embedding column so the header parses.
  for (std::size_t j = 0; j < std::max<std::size_t>(dim, 1); ++j)
    out << ",e" << j;
  out << "\n";
  for (const auto& r : split.records) {
    out << r.utt_id << ',' << r.speaker_id << ',' << to_string(r.group);
    for (double v : r.vector) out << ',' << format_real(v);
    out << "\n";
  }
  if (!out) fail("write failure on '" + path.string() + "'");
}

inline std::vector<Trial> load_trials(const std::filesystem::path& path) {
  auto in = detail::open_input(path);
  std::string line;
  if (!std::getline(in, line)) fail(path.string() + ": empty file");
  auto header = detail::split_csv_line(line);
  require(header.size() == 4 && header[0] == "enrol_utt",
          path.string() + ": bad header (expected enrol_utt,test_utt,label,group_tag)");
  std::vector<Trial> trials;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto fields = detail::split_csv_line(line);
    const std::string where = path.string() + ":" + std::to_string(lineno);
    require(fields.size() == 4, where + ": expected 4 fields");
    try {
      trials.push_back(Trial{fields[0], fields[1], parse_trial_label(fields[2]),
                             parse_group_tag(fields[3])});
    } catch (const Error& e) {
      fail(where + ": " + e.what());
    }
  }
  return trials;
}

inline void save_trials(const std::vector<Trial>& trials,
                        const std::filesystem::path& path) {
  auto out = detail::open_output(path);
  out << "enrol_utt,test_utt,label,group_tag\n";
  for (const auto& t : trials) {
    out << t.enrol_utt << ',' << t.test_utt << ',' << to_string(t.label) << ','
        << to_string(t.group_tag) << "\n";
  }
  if (!out) fail("write failure on '" + path.string() + "'");
}

inline std::vector<ScoredTrial> load_scores(const std::filesystem::path& path) {
  auto in = detail::open_input(path);
  std::string line;
  if (!std::getline(in, line)) fail(path.string() + ": empty file");
  auto header = detail::split_csv_line(line);
  require(header.size() == 5 && header[4] == "score",
          path.string() +
              ": bad header (expected enrol_utt,test_utt,label,group_tag,score)");
  std::vector<ScoredTrial> scored;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto fields = detail::split_csv_line(line);
    const std::string where = path.string() + ":" + std::to_string(lineno);
    require(fields.size() == 5, where + ": expected 5 fields");
    bool ok = false;
    const double score = parse_real(fields[4], &ok);
    require(ok && std::isfinite(score), where + ": bad score field");
    try {
      scored.push_back(
          ScoredTrial{Trial{fields[0], fields[1], parse_trial_label(fields[2]),
                            parse_group_tag(fields[3])},
                      score});
    } catch (const Error& e) {
      fail(where + ": " + e.what());
    }
  }
  return scored;
}

inline void save_scores(const std::vector<ScoredTrial>& scored,
                        const std::filesystem::path& path) {
  auto out = detail::open_output(path);
  out << "enrol_utt,test_utt,label,group_tag,score\n";
  for (const auto& s : scored) {
    out << s.trial.enrol_utt << ',' << s.trial.test_utt << ','
        << to_string(s.trial.label) << ',' << to_string(s.trial.group_tag)
        << ',' << format_real(s.score) << "\n";
  }
  if (!out) fail("write failure on '" + path.string() + "'");
}

}  // namespace fairsv
