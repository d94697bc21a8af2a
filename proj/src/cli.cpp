// Copyright 2026 The qdict Authors
// SPDX-License-Identifier: Apache-2.0

#include "qdict/cli.hpp"

#include <CLI11.hpp>
#include <omp.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "qdict/error.hpp"
#include "qdict/ph_dict.hpp"
#include "qdict/quotient_hash.hpp"
#include "qdict/retrieval.hpp"

namespace qdict::cli {
namespace {

std::string pow2_string(unsigned k) {
  if (k < 64) return std::to_string(std::uint64_t{1} << k);
  return "18446744073709551616";
}

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::vector<std::string> split_commas(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) parts.push_back(item);
  return parts;
}

[[noreturn]] void bad(const std::string& what) { throw DictError(Errc::kInvalidParams, what); }

// Inserts keys in order; ph-only overflow is handled by rebuilding.
template <typename Insert, typename Rebuild>
void fill(std::span<const Key> keys, Insert&& insert, Rebuild&& rebuild) {
  for (std::size_t i = 0; i < keys.size(); ++i) {
    for (;;) {
      try {
        insert(keys[i]);
        break;
      } catch (const DictError& e) {
        if (e.code() != Errc::kRebuildRequired) throw;
        rebuild(keys.first(i));
      }
    }
  }
}

}  // namespace

std::optional<std::uint64_t> parse_count(std::string_view text) {
  if (text.starts_with("2^")) {
    unsigned k = 0;
    const auto body = text.substr(2);
    const auto [p, ec] = std::from_chars(body.data(), body.data() + body.size(), k);
    if (ec != std::errc{} || p != body.data() + body.size() || k > 63) return std::nullopt;
    return std::uint64_t{1} << k;
  }
  std::uint64_t v = 0;
  const auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || p != text.data() + text.size() || text.empty()) return std::nullopt;
  return v;
}

std::optional<unsigned> parse_pow2_bits(std::string_view text) {
  if (text == "2^64") return 64u;
  const auto v = parse_count(text);
  if (!v || *v == 0 || (*v & (*v - 1)) != 0) return std::nullopt;
  return floor_log2(*v);
}

void apply_override(RunConfig& cfg, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) bad("--set expects name=value");
  const std::string name(assignment.substr(0, eq));
  const std::string text(assignment.substr(eq + 1));
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size() || !std::isfinite(v)) bad("--set " + name + ": not a number");
  auto& tun = cfg.tunables;
  if (name == "c") cfg.c = v;
  else if (name == "c1") tun.c1 = v;
  else if (name == "c2") tun.c2 = v;
  else if (name == "c4") tun.c4 = v;
  else if (name == "c5") tun.c5 = v;
  else if (name == "alpha") tun.alpha = v;
  else if (name == "delta") tun.delta = v;
  else bad("unknown tunable '" + name + "'");
}

void RunConfig::validate() const {
  if (n == 0) bad("n must be >= 1");
  if (t_grid.empty() || u_grid.empty()) bad("empty grid");
  if (trials == 0) bad("trials must be >= 1");
  if (payload_bits > PayloadStore::kMaxWidth) bad("r must be <= 64");
  for (unsigned u : u_grid) {
    if (u < 1 || u > 64) bad("u must be in [2, 2^64]");
    if (ceil_log2(n) > u) bad("need u >= n");
  }
  if (command == "collisions") {
    if (kind != StructureKind::kQhf) bad("collisions needs --kind qhf");
    const unsigned b = bucket_bits.value_or(std::min(universe_bits(), ceil_log2(n) + 2));
    QhfParams{universe_bits(), b, n, tunables.alpha, tunables.delta, identity}.validate();
    if (!identity && n > (std::uint64_t{1} << std::min(universe_bits(), 63u))) bad("n exceeds u");
    if (adversarial && !identity) bad("--adversarial needs --identity");
  } else {
    if (kind == StructureKind::kQhf) bad(command + " needs a dictionary kind");
    if (!(c >= 1.0)) bad("c must be >= 1");
    for (unsigned u : u_grid) {
      for (std::uint64_t t : t_grid) MembPhParams{n, t, u, tunables}.validate();
    }
  }
}

std::string collisions_csv(const RunConfig& cfg) {
  const unsigned u = cfg.universe_bits();
  const unsigned b = cfg.bucket_bits.value_or(std::min(u, ceil_log2(cfg.n) + 2));
  const double alpha = cfg.tunables.alpha;
  const double delta = cfg.tunables.delta;
  const double tau_sparse = sparse_threshold(cfg.n, b, delta);
  std::vector<std::string> rows(cfg.trials);
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(cfg.trials); ++i) {
    const std::uint64_t seed = split_seed(cfg.seed, static_cast<std::uint64_t>(i));
    Rng rng(seed);
    const auto h = QuotientHashFn::sample(QhfParams{u, b, cfg.n, alpha, delta, cfg.identity}, rng);
    std::vector<Key> keys;
    if (cfg.adversarial) {
      // All of S in bucket 0 of the identity function.
      for (std::uint64_t k = 0; k < cfg.n; ++k) keys.push_back(k % (std::uint64_t{1} << (u - b)));
      std::sort(keys.begin(), keys.end());
      keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
    } else {
      keys = distinct_keys(cfg.n, u, rng);
    }
    const auto dense = collision_census(h, keys, 2.0);
    const auto sparse = collision_census(h, keys, tau_sparse);
    const std::string prefix = std::to_string(i) + ',' + std::to_string(seed) + ',' + std::to_string(cfg.n) + ',' +
                               pow2_string(u) + ',' + pow2_string(b) + ',';
    rows[i] = prefix + fixed6(2.0) + ',' + std::to_string(dense.count) + ',' +
              fixed6(census_bound_dense(cfg.n, b, alpha)) + '\n' + prefix + fixed6(tau_sparse) + ',' +
              std::to_string(sparse.count) + ',' + fixed6(census_bound_sparse(cfg.n, b, alpha, delta)) + '\n';
  }
  std::string out = "trial,seed,n,u,b,tau,count,bound\n";
  for (const auto& r : rows) out += r;
  return out;
}

SpacePoint measure_space(const RunConfig& cfg, std::uint64_t t, unsigned universe_bits, std::uint64_t seed) {
  Rng rng(seed);
  const auto keys = distinct_keys(cfg.n, universe_bits, rng);
  const MembPhParams memb{cfg.n, t, universe_bits, cfg.tunables};
  const PhOnlyParams ph{cfg.n, t, universe_bits, cfg.c, cfg.tunables};
  SpacePoint point{t, universe_bits, 0};
  switch (cfg.kind) {
    case StructureKind::kMembPh: {
      MembPhDict d(memb, rng);
      for (Key k : keys) d.insert(k);
      point.bits = d.space_bits();
      break;
    }
    case StructureKind::kPhOnly: {
      PhOnlyDict d(ph, rng);
      fill(keys, [&](Key k) { d.insert(k); }, [&](std::span<const Key> r) { d.rebuild(r); });
      point.bits = d.space_bits();
      break;
    }
    case StructureKind::kRetrievalMemb: {
      MembRetrieval d(memb, cfg.payload_bits, rng);
      for (Key k : keys) d.insert(k, rng.bits(cfg.payload_bits));
      point.bits = d.space().total();
      break;
    }
    case StructureKind::kRetrievalPh: {
      PhRetrieval d(ph, cfg.payload_bits, rng);
      fill(keys, [&](Key k) { d.insert(k, rng.bits(cfg.payload_bits)); },
           [&](std::span<const Key> r) { d.rebuild(r); });
      point.bits = d.space().total();
      break;
    }
    case StructureKind::kQhf:
      bad("space needs a dictionary kind");
  }
  return point;
}

std::string space_csv(const RunConfig& cfg) {
  std::vector<std::pair<unsigned, std::uint64_t>> grid;
  for (unsigned u : cfg.u_grid) {
    for (std::uint64_t t : cfg.t_grid) grid.emplace_back(u, t);
  }
  const bool retrieval = cfg.kind == StructureKind::kRetrievalMemb || cfg.kind == StructureKind::kRetrievalPh;
  std::vector<std::string> rows(grid.size());
  std::vector<std::string> errors(grid.size());
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(grid.size()); ++i) {
    const auto [u, t] = grid[i];
    try {
      const auto p = measure_space(cfg, t, u, split_seed(cfg.seed, static_cast<std::uint64_t>(i)));
      const double n = static_cast<double>(cfg.n);
      const double lg_u_n = static_cast<double>(u) - std::log2(n);
      const double lglg = lg_u_n > 0 ? std::log2(lg_u_n) : 0.0;
      rows[i] = std::string(to_string(cfg.kind)) + ',' + std::to_string(cfg.n) + ',' + std::to_string(t) + ',' +
                pow2_string(u) + ',' + std::to_string(retrieval ? cfg.payload_bits : 0) + ',' +
                std::to_string(p.bits) + ',' + fixed6(static_cast<double>(p.bits) / n) + ',' + fixed6(lg_u_n) +
                ',' + fixed6(lglg) + ',' + fixed6(std::log2(n / (static_cast<double>(t) + 1.0))) + '\n';
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  }
  for (const auto& e : errors) {
    if (!e.empty()) throw DictError(Errc::kInvalidParams, e);
  }
  std::string out = "kind,n,t,u,r,bits,bits_per_key,lg_u_n,lglg_u_n,lg_n_t1\n";
  for (const auto& r : rows) out += r;
  return out;
}

namespace {

// Destination for CSV output: --out (relative to $QDICT_OUT_DIR when set),
// else $QDICT_OUT_DIR/<command>.csv, else the given stream.
void emit(const RunConfig& cfg, const std::string& text, std::ostream& out) {
  const char* dir = std::getenv(kOutDirEnv);
  std::filesystem::path path;
  if (!cfg.out.empty()) {
    path = cfg.out;
    if (dir && *dir && path.is_relative()) path = std::filesystem::path(dir) / path;
  } else if (dir && *dir) {
    path = std::filesystem::path(dir) / (cfg.command + ".csv");
  } else {
    out << text;
    return;
  }
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream file(path, std::ios::binary);
  if (!file) bad("cannot open " + path.string());
  file << text;
}

int run_verify_cmd(const RunConfig& cfg, std::ostream& out) {
  std::vector<VerifyReport> reports(cfg.trials);
  std::vector<std::string> errors(cfg.trials);
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(cfg.trials); ++i) {
    VerifyConfig v;
    v.kind = cfg.kind;
    v.n = cfg.n;
    v.t = cfg.t();
    v.universe_bits = cfg.universe_bits();
    v.payload_bits = cfg.payload_bits;
    v.ops = cfg.ops;
    v.seed = cfg.trials == 1 ? cfg.seed : split_seed(cfg.seed, static_cast<std::uint64_t>(i));
    v.c = cfg.c;
    v.tunables = cfg.tunables;
    v.inject_fault = cfg.inject_fault;
    try {
      reports[i] = run_verify(v);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  }
  for (const auto& e : errors) {
    if (!e.empty()) bad(e);
  }
  bool ok = true;
  for (std::size_t i = 0; i < reports.size(); ++i) {
    out << "verify kind=" << to_string(cfg.kind) << " n=" << cfg.n << " t=" << cfg.t()
        << " u=2^" << cfg.universe_bits() << " trial=" << i << ' ' << reports[i].summary() << ' '
        << (reports[i].ok() ? "OK" : "FAIL") << '\n';
    ok = ok && reports[i].ok();
  }
  return ok ? kExitOk : kExitDiscrepancy;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"dynamic dictionary verification and measurement", "qdict"};
  app.require_subcommand(1);
  RunConfig cfg;
  std::string n_text = "2^10", t_text, u_text, b_text, kind_text;
  std::vector<std::string> overrides;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--n", n_text, "capacity, decimal or 2^k")->capture_default_str();
    sub->add_option("--t", t_text, "hashcode slack, decimal or 2^k (comma list for space)");
    sub->add_option("--u", u_text, "universe size, a power of two (comma list for space)");
    sub->add_option("--kind", kind_text, "memb-ph | ph-only | retrieval-memb | retrieval-ph | qhf (default: qhf for collisions, else memb-ph)");
    sub->add_option("--trials", cfg.trials, "independent trials")->capture_default_str();
    sub->add_option("--seed", cfg.seed, "root seed")->capture_default_str();
    sub->add_option("--out", cfg.out, "output file (CSV commands)");
    sub->add_option("--set", overrides, "tunable override name=value (c, c1, c2, c4, c5, alpha, delta)");
    sub->add_option("--r", cfg.payload_bits, "payload bits for retrieval kinds")->capture_default_str();
  };

  auto* verify = app.add_subcommand("verify", "random operations against a shadow model");
  add_common(verify);
  verify->add_option("--ops", cfg.ops, "number of operations")->capture_default_str();
  verify->add_flag("--inject-fault", cfg.inject_fault, "corrupt one recorded code (detector check)");

  auto* collisions = app.add_subcommand("collisions", "collision census trials of the quotient hash");
  add_common(collisions);
  collisions->add_option("--b", b_text, "bucket count, a power of two (default 4n)");
  collisions->add_flag("--identity", cfg.identity, "use the identity quotient function");
  collisions->add_flag("--adversarial", cfg.adversarial, "put all of S in one identity bucket");

  auto* space = app.add_subcommand("space", "space of filled structures over a (u, t) grid");
  add_common(space);

  try {
    std::vector<std::string> args(argv + 1, argv + argc);
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    err << "qdict: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    cfg.command = app.get_subcommands().front()->get_name();
    if (kind_text.empty()) kind_text = cfg.command == "collisions" ? "qhf" : "memb-ph";
    const auto kind = parse_kind(kind_text);
    if (!kind) bad("unknown kind '" + kind_text + "'");
    cfg.kind = *kind;
    const auto n = parse_count(n_text);
    if (!n) bad("bad --n '" + n_text + "'");
    cfg.n = *n;
    if (u_text.empty()) u_text = "2^20";
    cfg.u_grid.clear();
    for (const auto& part : split_commas(u_text)) {
      const auto bits = parse_pow2_bits(part);
      if (!bits) bad("bad --u '" + part + "' (power of two expected)");
      cfg.u_grid.push_back(*bits);
    }
    if (t_text.empty()) t_text = n_text;
    cfg.t_grid.clear();
    for (const auto& part : split_commas(t_text)) {
      const auto t = parse_count(part);
      if (!t) bad("bad --t '" + part + "'");
      cfg.t_grid.push_back(*t);
    }
    if (cfg.command != "space" && (cfg.u_grid.size() != 1 || cfg.t_grid.size() != 1)) {
      bad("lists for --u/--t are only accepted by space");
    }
    if (!b_text.empty()) {
      const auto b = parse_pow2_bits(b_text);
      if (!b) bad("bad --b '" + b_text + "' (power of two expected)");
      cfg.bucket_bits = *b;
    }
    for (const auto& o : overrides) apply_override(cfg, o);
    cfg.validate();

    if (cfg.command == "verify") return run_verify_cmd(cfg, out);
    emit(cfg, cfg.command == "collisions" ? collisions_csv(cfg) : space_csv(cfg), out);
    return kExitOk;
  } catch (const DictError& e) {
    err << "qdict: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "qdict: " << e.what() << '\n';
    return kExitConfig;
  }
}

}  // namespace qdict::cli
