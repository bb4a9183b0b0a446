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

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bellsel/bellsel.hpp"

namespace bellsel::cli {

namespace fs = std::filesystem;

// Flag values that fail validation after parsing.
class FlagError : public Error {
 public:
  FlagError(const std::string& flag, const std::string& what) : Error(flag + ": " + what) {}
};

inline std::vector<double> parse_number_list(const std::string& flag, const std::string& text, std::size_t n) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw FlagError(flag, "'" + item + "' is not a number");
    }
    if (used != item.size() || !std::isfinite(v)) throw FlagError(flag, "'" + item + "' is not a finite number");
    out.push_back(v);
  }
  if (out.size() != n) throw FlagError(flag, "expected " + std::to_string(n) + " comma-separated values");
  return out;
}

inline AngleConfig parse_angles(const std::string& text) {
  if (text.empty()) return AngleConfig::chsh_optimal();
  const auto v = parse_number_list("--angles", text, 4);
  return {v[0], v[1], v[2], v[3]};
}

inline RecordFormat parse_record_format(const std::string& s) {
  return s == "csv" ? RecordFormat::Csv : RecordFormat::Jsonl;
}

inline std::string extension(RecordFormat f) { return f == RecordFormat::Csv ? ".csv" : ".jsonl"; }

inline std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("BELLSEL_SEED")) {
    std::uint64_t v = 0;
    const std::string s(env);
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
      throw FlagError("--seed", "BELLSEL_SEED='" + s + "' is not an unsigned integer");
    return v;
  }
  throw FlagError("--seed", "no seed given; pass --seed or set BELLSEL_SEED");
}

/// Collects output files and commits them together, so a failing command
/// leaves none of them behind.
class OutputSet {
 public:
  void add(fs::path path, std::string content) { files_.emplace_back(std::move(path), std::move(content)); }

  std::vector<std::string> commit() {
    std::vector<fs::path> temps;
    try {
      for (const auto& [path, content] : files_) {
        auto tmp = path;
        tmp += ".tmp";
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot open " + tmp.string() + " for writing");
        temps.push_back(tmp);
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.close();
        if (!out) throw Error("write failed for " + path.string());
      }
    } catch (...) {
      std::error_code ec;
      for (const auto& t : temps) fs::remove(t, ec);
      throw;
    }
    std::vector<std::string> names;
    for (std::size_t i = 0; i < files_.size(); ++i) {
      fs::rename(temps[i], files_[i].first);
      names.push_back(files_[i].first.string());
    }
    return names;
  }

 private:
  std::vector<std::pair<fs::path, std::string>> files_;
};

inline std::string serialize(const Ensemble& e, RecordFormat fmt) {
  std::ostringstream os;
  write_ensemble(os, e, fmt);
  return os.str();
}

inline ojson selection_summary(const Ensemble& e) {
  std::map<std::string, std::uint64_t> counts;
  for (const auto& r : e.records) ++counts[r.sel ? r.sel->str() : kUnlabeledGroup];
  ojson freq, cnt;
  for (const auto& [k, v] : counts) {
    cnt[k] = v;
    freq[k] = static_cast<double>(v) / static_cast<double>(e.size());
  }
  ojson j;
  j["sel_counts"] = cnt;
  j["sel_frequencies"] = freq;
  return j;
}

inline ojson base_summary(const Ensemble& e) {
  ojson j;
  j["generator"] = e.meta.generator;
  j["seed"] = e.meta.seed;
  j["config_digest"] = e.meta.config_digest;
  j["shots"] = e.meta.shots;
  j["records"] = e.size();
  return j;
}

struct Context {
  std::vector<std::string> argv;
  std::ostream& out;
  std::ostream& err;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

  std::string command_line() const {
    std::string s;
    for (const auto& a : argv) s += (s.empty() ? "" : " ") + a;
    return s;
  }
};

inline std::string manifest(const Context& ctx, std::uint64_t seed, const std::string& digest,
                            const std::vector<std::string>& outputs) {
  ojson m;
  m["command"] = ctx.command_line();
  m["seed"] = seed;
  m["config_digest"] = digest;
  m["version"] = kVersion;
  m["outputs"] = outputs;
  m["wall_clock_seconds"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - ctx.start).count();
  return m.dump(2) + "\n";
}

// Writes the ensemble (to --out, or stdout when absent) with its summary
// and manifest sidecars.
inline void emit_ensemble(const Context& ctx, const Ensemble& e, RecordFormat fmt, const std::string& out_path,
                          const ojson& summary) {
  if (out_path.empty()) {
    write_ensemble(ctx.out, e, fmt);
    ctx.err << summary.dump() << '\n';
    return;
  }
  OutputSet files;
  files.add(out_path, serialize(e, fmt));
  files.add(out_path + ".summary.json", summary.dump(2) + "\n");
  auto names = files.commit();
  write_file_atomic(out_path + ".manifest.json", manifest(ctx, e.meta.seed, e.meta.config_digest, names));
}

struct GenFlags {
  std::uint64_t shots = 0;
  std::optional<std::uint64_t> seed;
  std::string angles;
  std::string format = "jsonl";
  std::string out;
  unsigned threads = 0;
};

inline void add_gen_flags(CLI::App* cmd, GenFlags& f) {
  cmd->add_option("--shots", f.shots, "Number of runs")->required()->check(CLI::Range(std::uint64_t{1}, std::numeric_limits<std::uint64_t>::max()));
  cmd->add_option("--seed", f.seed, "64-bit seed (fallback: BELLSEL_SEED)");
  cmd->add_option("--angles", f.angles, "Analyzer angles a0,a1,b0,b1 in radians");
  cmd->add_option("--format", f.format, "Record format")->check(CLI::IsMember({"jsonl", "csv"}));
  cmd->add_option("--out", f.out, "Output path (stdout when omitted)");
  cmd->add_option("--threads", f.threads, "Worker threads (0 = all cores)");
}

inline int cmd_vrun(const Context& ctx, const GenFlags& f, const std::string& state, const std::string& weights) {
  const auto angles = parse_angles(f.angles);
  const auto seed = resolve_seed(f.seed);
  if (!weights.empty() && state != "weighted") throw FlagError("--weights", "requires --state weighted");
  Ensemble e;
  if (state == "product") {
    e = run_independent_labels(product_state_00(), angles, f.shots, seed, f.threads);
  } else {
    VConfig config;
    config.angles = angles;
    if (state == "random") {
      config.state_policy = RandomUniformState{};
    } else if (state == "weighted") {
      if (weights.empty()) throw FlagError("--weights", "required with --state weighted");
      const auto w = parse_number_list("--weights", weights, 4);
      WeightedState ws{{w[0], w[1], w[2], w[3]}};
      try {
        validate_weights(ws.weights);
      } catch (const Error& ex) {
        throw FlagError("--weights", ex.what());
      }
      config.state_policy = ws;
    } else {
      config.state_policy = FixedState{*parse_bell_label(state)};
    }
    e = run_v(config, f.shots, seed, f.threads);
  }
  auto summary = base_summary(e);
  summary.update(selection_summary(e));
  emit_ensemble(ctx, e, parse_record_format(f.format), f.out, summary);
  return 0;
}

inline int cmd_wrun(const Context& ctx, const GenFlags& f) {
  const auto e = run_w(parse_angles(f.angles), f.shots, resolve_seed(f.seed), f.threads);
  auto summary = base_summary(e);
  summary.update(selection_summary(e));
  emit_ensemble(ctx, e, parse_record_format(f.format), f.out, summary);
  return 0;
}

inline int cmd_toy_retention(const Context& ctx, const GenFlags& f, const std::string& state, const std::string& rule) {
  const auto res = charlie_retention(f.shots, resolve_seed(f.seed), *parse_bell_label(state), parse_angles(f.angles),
                                     rule == "perfect-match" ? RetentionRule::kPerfectMatch : RetentionRule::kBornRule,
                                     f.threads);
  auto summary = base_summary(res.retained);
  summary["attempted"] = res.attempted;
  summary["retained"] = res.retained_count;
  summary["retained_fraction"] = res.retained_fraction();
  summary["rule"] = rule;
  summary["target"] = state;
  emit_ensemble(ctx, res.retained, parse_record_format(f.format), f.out, summary);
  return 0;
}

inline int cmd_toy_hoppers(const Context& ctx, const GenFlags& f) {
  if (f.out.empty()) throw FlagError("--out", "hoppers needs an output prefix");
  const auto seed = resolve_seed(f.seed);
  const auto res = charlie_hoppers(f.shots, seed, parse_angles(f.angles), f.threads);
  const auto fmt = parse_record_format(f.format);
  OutputSet files;
  ojson summary;
  summary["generator"] = "toy-hoppers";
  summary["seed"] = seed;
  summary["attempted"] = res.attempted;
  summary["total"] = res.total();
  ojson sizes, occupancy, paths;
  for (std::size_t i = 0; i < 4; ++i) {
    const auto name = "H" + std::to_string(i);
    const auto path = f.out + "." + name + extension(fmt);
    files.add(path, serialize(res.hoppers[i], fmt));
    sizes[name] = res.hoppers[i].size();
    occupancy[name] = static_cast<double>(res.hoppers[i].size()) / static_cast<double>(res.attempted);
    paths[name] = fs::path(path).filename().string();
  }
  summary["hopper_sizes"] = sizes;
  summary["occupancy"] = occupancy;
  summary["files"] = paths;
  files.add(f.out + ".summary.json", summary.dump(2) + "\n");
  const auto names = files.commit();
  write_file_atomic(f.out + ".manifest.json", manifest(ctx, seed, res.hoppers[0].meta.config_digest, names));
  return 0;
}

inline const std::set<std::string> kReports = {"chsh", "msbc", "nosignal", "factorizability"};

struct AnalyzeFlags {
  std::string in;
  std::string group_by = "none";
  std::string reports = "chsh,msbc,nosignal,factorizability";
  double z = kDefaultZ;
  std::string format = "table";
  std::string out;
};

inline int cmd_analyze(const Context& ctx, const AnalyzeFlags& f) {
  std::vector<std::string> wanted;
  {
    std::stringstream ss(f.reports);
    std::string item;
    while (std::getline(ss, item, ','))
      if (!item.empty()) {
        if (!kReports.count(item)) throw FlagError("--report", "unknown report '" + item + "'");
        wanted.push_back(item);
      }
    if (wanted.empty()) throw FlagError("--report", "no reports requested");
  }
  if (!(f.z > 0.0) || !std::isfinite(f.z)) throw FlagError("--z", "must be a positive number");
  if (!fs::exists(f.in)) throw FlagError("--in", "no such file: " + f.in);
  const Ensemble e = read_ensemble_file(f.in);
  if (e.empty()) throw FlagError("--in", "ensemble has no records");
  const auto by = f.group_by == "sel" ? GroupBy::kSelection : GroupBy::kNone;
  const bool json = f.format == "json";

  ojson j;
  j["input"] = f.in;
  j["records"] = e.size();
  j["generator"] = e.meta.generator;
  j["group_by"] = f.group_by;
  j["z"] = f.z;
  std::ostringstream table;
  table << "input " << f.in << " records=" << e.size() << " group_by=" << f.group_by << '\n';

  for (const auto& name : wanted) {
    if (name == "chsh") {
      ojson arr = ojson::array();
      for (const auto& rep : estimate_correlations(e, by)) {
        const auto c = estimate_chsh(rep, f.z);
        auto cj = to_ojson(c, rep.group);
        cj["correlations"] = to_ojson(rep);
        arr.push_back(cj);
        table << to_table(rep) << to_table(c, rep.group);
      }
      j["chsh"] = arr;
    } else if (name == "msbc") {
      const bool labeled = std::all_of(e.records.begin(), e.records.end(), [](const RunRecord& r) { return r.sel.has_value(); });
      if (!labeled) {
        j["msbc"] = {{"status", "unavailable"}, {"reason", "records without a selection label"}};
        table << "msbc unavailable: records without a selection label\n";
      } else {
        const auto m = msbc_test(e, f.z);
        j["msbc"] = to_ojson(m);
        table << to_table(m);
      }
    } else if (name == "nosignal") {
      const auto r = no_signalling_check(e, by, f.z);
      j["nosignal"] = to_ojson(r);
      table << to_table(r);
    } else {
      const auto r = factorizability_check(e, by, f.z);
      j["factorizability"] = to_ojson(r);
      table << to_table(r);
    }
  }
  const std::string text = json ? j.dump(2) + "\n" : table.str();
  if (f.out.empty()) ctx.out << text;
  else write_file_atomic(f.out, text);
  return 0;
}

inline void emit_report(const Context& ctx, const std::string& format, const ojson& j, const std::string& table) {
  ctx.out << (format == "json" ? j.dump(2) + "\n" : table);
}

struct ForkFlags {
  std::uint64_t n = 0;
  std::optional<std::uint64_t> seed;
  std::string format = "table";
  int given = 0;
  std::string digits_a, digits_b;
  bool synthetic = false;
  double p_white = 0.5, p_k = 0.2, p_l = 0.2;
  bool preselect = false;
  bool msbc = false;
  double z = kDefaultZ;
};

// Optionally appends the fork-level MSBC comparison.
inline void emit_fork(const Context& ctx, const ForkFlags& f, const ForkReport& r) {
  auto j = to_ojson(r);
  auto table = to_table(r);
  if (f.msbc) {
    const auto m = fork_msbc(r, f.z);
    if (m) {
      j["msbc"] = to_ojson(*m);
      table += to_table(*m);
    } else {
      j["msbc"] = {{"status", "unavailable"}, {"reason", "no population table"}};
      table += "  msbc unavailable: no population table\n";
    }
  }
  emit_report(ctx, f.format, j, table);
}

inline int cmd_forks_collider(const Context& ctx, const ForkFlags& f) {
  const auto r = collider_demo(f.n, resolve_seed(f.seed), f.given);
  emit_fork(ctx, f, r);
  return 0;
}

inline int cmd_forks_parity(const Context& ctx, const ForkFlags& f) {
  DigitSeq s1, s2;
  if (f.synthetic) {
    if (!f.digits_a.empty() || !f.digits_b.empty())
      throw FlagError("--synthetic", "cannot be combined with --digits-a/--digits-b");
    const auto seed = resolve_seed(f.seed);
    s1 = synthetic_digits(f.n, seed, 0);
    s2 = synthetic_digits(f.n, seed, 1);
  } else {
    if (f.digits_a.empty() || f.digits_b.empty())
      throw FlagError("--digits-a", "both --digits-a and --digits-b are required without --synthetic");
    s1 = load_digits(f.digits_a, f.n);
    s2 = load_digits(f.digits_b, f.n);
  }
  const auto r = parity_correlator(s1, s2);
  emit_fork(ctx, f, r);
  return 0;
}

inline int cmd_forks_mice(const Context& ctx, const ForkFlags& f) {
  const MiceParams p{f.p_white, f.p_k, f.p_l};
  const auto seed = resolve_seed(f.seed);
  const auto r = f.preselect ? mice_preselected(f.n, seed, p) : mice_demo(f.n, seed, p);
  emit_fork(ctx, f, r);
  return 0;
}

struct ExactFlags {
  std::string state;
  std::string mixture;
  std::string weights;
  std::string angles;
  std::string format = "table";
};

/// Closed-form joint distributions, correlators and CHSH family: the
/// no-sampling path.
inline int cmd_exact(const Context& ctx, const ExactFlags& f) {
  const int sources = !f.state.empty() + !f.mixture.empty() + !f.weights.empty();
  if (sources > 1) throw FlagError("--state", "give only one of --state, --mixture, --weights");
  const auto angles = parse_angles(f.angles);
  BellWeights w{1.0, 0.0, 0.0, 0.0};
  std::string source = "C0";
  if (!f.state.empty()) {
    w = {};
    w[index_of(*parse_bell_label(f.state))] = 1.0;
    source = to_string(*parse_bell_label(f.state));
  } else if (!f.mixture.empty()) {
    w = kUniformWeights;
    source = "uniform mixture";
  } else if (!f.weights.empty()) {
    const auto v = parse_number_list("--weights", f.weights, 4);
    w = {v[0], v[1], v[2], v[3]};
    try {
      validate_weights(w);
    } catch (const Error& ex) {
      throw FlagError("--weights", ex.what());
    }
    source = "weighted mixture";
  }

  std::array<double, 4> e{};
  ojson pairs = ojson::array();
  std::ostringstream table;
  table << "exact " << source << " angles a0=" << angles.a0 << " a1=" << angles.a1 << " b0=" << angles.b0
        << " b1=" << angles.b1 << '\n';
  table << "  a b     P(0,0)       P(0,1)       P(1,0)       P(1,1)            E\n";
  for (Bit a = 0; a < 2; ++a)
    for (Bit b = 0; b < 2; ++b) {
      const auto d = mixed_joint_probabilities(w, angles.alice(a), angles.bob(b));
      e[2 * a + b] = correlator(d);
      ojson pj;
      pj["a"] = a;
      pj["b"] = b;
      pj["p"] = d.cells();
      pj["E"] = e[2 * a + b];
      pairs.push_back(pj);
      char buf[160];
      std::snprintf(buf, sizeof buf, "  %d %d %12.9f %12.9f %12.9f %12.9f %+12.9f\n", a, b, d(0, 0), d(0, 1), d(1, 0),
                    d(1, 1), e[2 * a + b]);
      table << buf;
    }
  const auto chsh = chsh_evaluate(e);
  char buf[160];
  std::snprintf(buf, sizeof buf, "  CHSH S=%+.12f |S|=%.12f minus=(%zu,%zu)\n", chsh.s, std::abs(chsh.s),
                chsh.minus_pair >> 1, chsh.minus_pair & 1);
  table << buf;
  std::snprintf(buf, sizeof buf, "  family %+.9f %+.9f %+.9f %+.9f\n", chsh.family[0], chsh.family[1],
                chsh.family[2], chsh.family[3]);
  table << buf;

  ojson j;
  j["source"] = source;
  j["weights"] = w;
  j["angles"] = to_json(angles);
  j["pairs"] = pairs;
  j["S"] = chsh.s;
  j["minus_pair"] = {chsh.minus_pair >> 1, chsh.minus_pair & 1};
  j["family"] = chsh.family;
  emit_report(ctx, f.format, j, table.str());
  return 0;
}

/// Entry point shared by the executable and the tests.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  Context ctx{std::vector<std::string>(argv, argv + argc), out, err};
  CLI::App app{"bellsel: Bell correlations as selection artefacts"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  GenFlags gen;
  std::string state = "c0", weights, rule = "qm";
  const auto state_choices = CLI::IsMember({"c0", "c1", "c2", "c3", "random", "weighted", "product"});

  auto* vrun = app.add_subcommand("vrun", "V-shaped Bell experiment ensemble");
  add_gen_flags(vrun, gen);
  vrun->add_option("--state", state, "Initial state policy")->check(state_choices);
  vrun->add_option("--weights", weights, "Bell-state weights w0,w1,w2,w3 (with --state weighted)");

  auto* wrun = app.add_subcommand("wrun", "W-shaped entanglement-swapping ensemble");
  add_gen_flags(wrun, gen);

  auto* toy = app.add_subcommand("toy", "Classical postselection toy models");
  toy->require_subcommand(1);
  auto* retention = toy->add_subcommand("retention", "Charlie's probabilistic retention");
  add_gen_flags(retention, gen);
  retention->add_option("--state", state, "Target Bell state")->check(CLI::IsMember({"c0", "c1", "c2", "c3"}));
  retention->add_option("--rule", rule, "Retention rule")->check(CLI::IsMember({"qm", "perfect-match"}));
  auto* hoppers = toy->add_subcommand("hoppers", "Sort every run into four hoppers");
  add_gen_flags(hoppers, gen);

  AnalyzeFlags an;
  auto* analyze = app.add_subcommand("analyze", "Run the statistical test battery on an ensemble");
  analyze->add_option("--in", an.in, "Ensemble file (JSONL or CSV)")->required();
  analyze->add_option("--group-by", an.group_by)->check(CLI::IsMember({"none", "sel"}));
  analyze->add_option("--report", an.reports, "Comma list of chsh,msbc,nosignal,factorizability");
  analyze->add_option("--z", an.z, "Significance threshold in standard errors");
  analyze->add_option("--format", an.format)->check(CLI::IsMember({"json", "table"}));
  analyze->add_option("--out", an.out, "Report path (stdout when omitted)");

  ForkFlags ff;
  auto* forks = app.add_subcommand("forks", "Classical selection-bias demonstrations");
  forks->require_subcommand(1);
  auto fork_common = [&](CLI::App* c) {
    c->add_option("--seed", ff.seed, "64-bit seed (fallback: BELLSEL_SEED)");
    c->add_option("--format", ff.format)->check(CLI::IsMember({"json", "table"}));
    c->add_flag("--msbc", ff.msbc, "Also compare restricted vs population correlators");
    c->add_option("--z", ff.z, "Significance threshold for --msbc")->check(CLI::PositiveNumber);
  };
  auto* collider = forks->add_subcommand("collider", "Collider F = G xor H");
  collider->add_option("--n", ff.n)->required()->check(CLI::Range(std::uint64_t{2}, std::numeric_limits<std::uint64_t>::max()));
  collider->add_option("--given", ff.given, "Condition on F = 0 or 1")->check(CLI::IsMember({0, 1}));
  fork_common(collider);
  auto* parity = forks->add_subcommand("parity", "Digit-parity Correlator");
  parity->add_option("--n", ff.n)->required()->check(CLI::Range(std::uint64_t{1}, std::numeric_limits<std::uint64_t>::max()));
  parity->add_option("--digits-a", ff.digits_a, "Digit file for the first sequence");
  parity->add_option("--digits-b", ff.digits_b, "Digit file for the second sequence");
  parity->add_flag("--synthetic", ff.synthetic, "Use i.i.d. uniform synthetic digits");
  fork_common(parity);
  auto* mice = forks->add_subcommand("mice", "White-mice range restriction");
  mice->add_option("--n", ff.n)->required()->check(CLI::Range(std::uint64_t{2}, std::numeric_limits<std::uint64_t>::max()));
  mice->add_option("--p-white", ff.p_white)->check(CLI::Range(0.0, 1.0));
  mice->add_option("--p-k", ff.p_k)->check(CLI::Range(0.0, 1.0));
  mice->add_option("--p-l", ff.p_l)->check(CLI::Range(0.0, 1.0));
  mice->add_flag("--preselect", ff.preselect, "Breed white mice only instead of filtering");
  fork_common(mice);

  ExactFlags ex;
  auto* exact = app.add_subcommand("exact", "Closed-form distributions and CHSH");
  exact->add_option("--state", ex.state)->check(CLI::IsMember({"c0", "c1", "c2", "c3"}));
  exact->add_option("--mixture", ex.mixture)->check(CLI::IsMember({"uniform"}));
  exact->add_option("--weights", ex.weights, "Bell-state weights w0,w1,w2,w3");
  exact->add_option("--angles", ex.angles, "Analyzer angles a0,a1,b0,b1 in radians");
  exact->add_option("--format", ex.format)->check(CLI::IsMember({"json", "table"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << '\n';
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return e.get_exit_code() ? e.get_exit_code() : 2;
  }

  try {
    if (*vrun) return cmd_vrun(ctx, gen, state, weights);
    if (*wrun) return cmd_wrun(ctx, gen);
    if (*retention) return cmd_toy_retention(ctx, gen, state, rule);
    if (*hoppers) return cmd_toy_hoppers(ctx, gen);
    if (*analyze) return cmd_analyze(ctx, an);
    if (*collider) return cmd_forks_collider(ctx, ff);
    if (*parity) return cmd_forks_parity(ctx, ff);
    if (*mice) return cmd_forks_mice(ctx, ff);
    if (*exact) return cmd_exact(ctx, ex);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}

}  // namespace bellsel::cli
