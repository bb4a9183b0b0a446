// Copyright 2026 The bellsel Authors
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

#pragma once

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>

#include "bellsel/ensemble.hpp"

namespace bellsel {

enum class RecordFormat { Jsonl, Csv };

inline constexpr std::string_view kMetaPrefix = "#meta ";
inline constexpr std::string_view kCsvHeader = "run,a,b,A,B,sel,geometry";

inline nlohmann::ordered_json meta_to_json(const EnsembleMeta& m, std::size_t records) {
  nlohmann::ordered_json j;
  j["generator"] = m.generator;
  j["version"] = kVersion;
  j["seed"] = m.seed;
  j["config_digest"] = m.config_digest;
  j["shots"] = m.shots;
  j["records"] = records;
  if (m.retained) j["retained"] = *m.retained;
  j["angles"] = to_json(m.angles);
  j["config"] = m.config;
  return j;
}

inline EnsembleMeta meta_from_json(const nlohmann::json& j) {
  EnsembleMeta m;
  m.generator = j.value("generator", "");
  m.seed = j.value("seed", std::uint64_t{0});
  m.config_digest = j.value("config_digest", "");
  m.shots = j.at("shots").get<std::uint64_t>();
  if (j.contains("retained")) m.retained = j.at("retained").get<std::uint64_t>();
  if (j.contains("angles")) m.angles = angles_from_json(j.at("angles"));
  if (j.contains("config")) m.config = j.at("config");
  return m;
}

inline void write_record(std::ostream& os, const RunRecord& r, RecordFormat fmt) {
  char buf[128];
  const std::string sel = r.sel ? r.sel->str() : std::string();
  const char geo = r.geometry == Geometry::V ? 'V' : 'W';
  int n;
  if (fmt == RecordFormat::Jsonl) {
    const std::string sel_field = r.sel ? "\"" + sel + "\"" : "null";
    n = std::snprintf(buf, sizeof buf,
                      "{\"run\":%llu,\"a\":%d,\"b\":%d,\"A\":%d,\"B\":%d,\"sel\":%s,\"geometry\":\"%c\"}\n",
                      static_cast<unsigned long long>(r.run), r.a, r.b, r.A, r.B, sel_field.c_str(), geo);
  } else {
    n = std::snprintf(buf, sizeof buf, "%llu,%d,%d,%d,%d,%s,%c\n",
                      static_cast<unsigned long long>(r.run), r.a, r.b, r.A, r.B, sel.c_str(), geo);
  }
  os.write(buf, n);
}

inline void write_ensemble(std::ostream& os, const Ensemble& e, RecordFormat fmt) {
  os << kMetaPrefix << meta_to_json(e.meta, e.records.size()).dump() << '\n';
  if (fmt == RecordFormat::Csv) os << kCsvHeader << '\n';
  for (const auto& r : e.records) write_record(os, r, fmt);
}

namespace detail {

inline Bit parse_bit_field(const nlohmann::json& j, const char* key) {
  const auto& v = j.at(key);
  require(v.is_number_integer() && (v.get<int>() == 0 || v.get<int>() == 1),
          std::string("field '") + key + "' must be 0 or 1");
  return static_cast<Bit>(v.get<int>());
}

inline RunRecord parse_jsonl_record(std::string_view line) {
  const auto j = nlohmann::json::parse(line);
  require(j.is_object(), "record is not a JSON object");
  RunRecord r;
  const auto& run = j.at("run");
  require(run.is_number_unsigned() || (run.is_number_integer() && run.get<long long>() >= 0),
          "field 'run' must be a non-negative integer");
  r.run = run.get<std::uint64_t>();
  r.a = parse_bit_field(j, "a");
  r.b = parse_bit_field(j, "b");
  r.A = parse_bit_field(j, "A");
  r.B = parse_bit_field(j, "B");
  const auto& sel = j.at("sel");
  if (!sel.is_null()) {
    require(sel.is_string(), "field 'sel' must be a string or null");
    r.sel = SelLabel::parse(sel.get<std::string>());
    require(r.sel.has_value(), "field 'sel' must be one of C0..C3, M0..M3");
  }
  const auto geo = j.at("geometry").get<std::string>();
  require(geo == "V" || geo == "W", "field 'geometry' must be \"V\" or \"W\"");
  r.geometry = geo == "V" ? Geometry::V : Geometry::W;
  return r;
}

inline RunRecord parse_csv_record(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    fields.push_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  require(fields.size() == 7, "expected 7 comma-separated fields, got " + std::to_string(fields.size()));
  RunRecord r;
  const auto& f0 = fields[0];
  auto [ptr, ec] = std::from_chars(f0.data(), f0.data() + f0.size(), r.run);
  require(ec == std::errc() && ptr == f0.data() + f0.size() && !f0.empty(), "field 'run' is not an integer");
  const char* names[] = {"a", "b", "A", "B"};
  Bit* bits[] = {&r.a, &r.b, &r.A, &r.B};
  for (int i = 0; i < 4; ++i) {
    const auto f = fields[1 + i];
    require(f == "0" || f == "1", std::string("field '") + names[i] + "' must be 0 or 1");
    *bits[i] = static_cast<Bit>(f[0] - '0');
  }
  if (!fields[5].empty()) {
    r.sel = SelLabel::parse(fields[5]);
    require(r.sel.has_value(), "field 'sel' must be empty or one of C0..C3, M0..M3");
  }
  require(fields[6] == "V" || fields[6] == "W", "field 'geometry' must be V or W");
  r.geometry = fields[6] == "V" ? Geometry::V : Geometry::W;
  return r;
}

}  // namespace detail

/// Parses JSONL or CSV (detected from content). Errors carry the 1-based
/// line number of the first offending line.
inline Ensemble read_ensemble(std::istream& is) {
  Ensemble e;
  bool have_meta = false;
  std::optional<RecordFormat> fmt;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    try {
      if (std::string_view(line).starts_with(kMetaPrefix)) {
        require(!have_meta && e.records.empty(), "unexpected #meta line");
        e.meta = meta_from_json(nlohmann::json::parse(line.substr(kMetaPrefix.size())));
        have_meta = true;
        continue;
      }
      if (!fmt) {
        if (line == kCsvHeader) {
          fmt = RecordFormat::Csv;
          continue;
        }
        fmt = line.front() == '{' ? RecordFormat::Jsonl : RecordFormat::Csv;
      }
      e.records.push_back(*fmt == RecordFormat::Jsonl ? detail::parse_jsonl_record(line)
                                                      : detail::parse_csv_record(line));
      if (e.records.size() > 1)
        require(e.records.back().run > e.records[e.records.size() - 2].run,
                "run ids must be strictly increasing");
    } catch (const std::exception& ex) {
      throw Error("line " + std::to_string(lineno) + ": " + ex.what());
    }
  }
  if (!have_meta) {
    e.meta.shots = e.records.size();
    e.meta.generator = "external";
  }
  return e;
}

inline Ensemble read_ensemble_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), "cannot open " + path.string());
  return read_ensemble(in);
}

/// Writes `content` atomically: a temporary sibling is renamed into place
/// only after a complete write, so failures never leave partial files.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    require(static_cast<bool>(out), "cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.close();
    if (!out) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw Error("write failed for " + path.string());
    }
  }
  std::filesystem::rename(tmp, path);
}

inline void write_ensemble_file(const std::filesystem::path& path, const Ensemble& e, RecordFormat fmt) {
  std::ostringstream os;
  write_ensemble(os, e, fmt);
  write_file_atomic(path, os.str());
}

}  // namespace bellsel
