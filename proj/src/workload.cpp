// Copyright 2026 The qdict Authors
// SPDX-License-Identifier: Apache-2.0

#include "qdict/workload.hpp"

#include <algorithm>
#include <memory>
#include <numeric>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "qdict/error.hpp"
#include "qdict/ph_dict.hpp"
#include "qdict/retrieval.hpp"

namespace qdict {

std::string_view to_string(StructureKind kind) noexcept {
  switch (kind) {
    case StructureKind::kMembPh: return "memb-ph";
    case StructureKind::kPhOnly: return "ph-only";
    case StructureKind::kRetrievalMemb: return "retrieval-memb";
    case StructureKind::kRetrievalPh: return "retrieval-ph";
    case StructureKind::kQhf: return "qhf";
  }
  return "?";
}

std::optional<StructureKind> parse_kind(std::string_view name) noexcept {
  for (auto k : {StructureKind::kMembPh, StructureKind::kPhOnly, StructureKind::kRetrievalMemb,
                 StructureKind::kRetrievalPh, StructureKind::kQhf}) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

std::vector<WorkloadOp> churn_workload(std::uint64_t n, unsigned universe_bits, std::uint64_t ops, Rng& rng) {
  if (n == 0 || universe_bits > 64 || (universe_bits < 64 && n > (std::uint64_t{1} << universe_bits) / 2)) {
    throw DictError(Errc::kInvalidParams, "churn needs 1 <= n <= u/2");
  }
  std::vector<WorkloadOp> out;
  out.reserve(ops);
  std::vector<Key> live;
  std::unordered_map<Key, std::size_t> index;
  for (std::uint64_t i = 0; i < ops; ++i) {
    const bool insert = live.empty() || (live.size() < n && (rng.next() >> 63) == 0);
    if (insert) {
      Key x;
      do {
        x = rng.bits(universe_bits);
      } while (index.contains(x));
      index.emplace(x, live.size());
      live.push_back(x);
      out.push_back({WorkloadOp::Kind::kInsert, x});
    } else {
      const std::size_t at = rng.below(live.size());
      const Key x = live[at];
      index[live.back()] = at;
      live[at] = live.back();
      live.pop_back();
      index.erase(x);
      out.push_back({WorkloadOp::Kind::kDelete, x});
    }
  }
  return out;
}

std::vector<Key> distinct_keys(std::uint64_t n, unsigned universe_bits, Rng& rng) {
  if (universe_bits < 64 && n > (std::uint64_t{1} << universe_bits)) {
    throw DictError(Errc::kInvalidParams, "more keys than the universe holds");
  }
  std::vector<Key> keys;
  keys.reserve(n);
  if (universe_bits < 64 && 2 * n > (std::uint64_t{1} << universe_bits)) {
    // Dense: partial Fisher-Yates over the whole universe.
    std::vector<Key> all(std::uint64_t{1} << universe_bits);
    std::iota(all.begin(), all.end(), Key{0});
    for (std::uint64_t i = 0; i < n; ++i) {
      std::swap(all[i], all[i + rng.below(all.size() - i)]);
      keys.push_back(all[i]);
    }
    return keys;
  }
  std::unordered_set<Key> seen;
  seen.reserve(n);
  while (keys.size() < n) {
    const Key x = rng.bits(universe_bits);
    if (seen.insert(x).second) keys.push_back(x);
  }
  return keys;
}

std::string VerifyReport::summary() const {
  std::ostringstream s;
  s << "ops=" << ops << " inserts=" << inserts << " erases=" << erases << " queries=" << queries
    << " sweeps=" << sweeps << " relabels=" << relabel_events << " forced_rebuilds=" << forced_rebuilds
    << " discrepancies=" << discrepancies;
  if (!first_discrepancy.empty()) s << " first=\"" << first_discrepancy << '"';
  return s.str();
}

namespace {

using Moves = std::span<const std::pair<Hashcode, Hashcode>>;

// Uniform adapter over the four engines.
class MembAdapter {
 public:
  MembAdapter(const VerifyConfig& cfg, Rng& rng) : d_(MembPhParams{cfg.n, cfg.t, cfg.universe_bits, cfg.tunables}, rng) {}
  template <typename F>
  void observe(F&& f) { d_.set_relabel_observer(std::forward<F>(f)); }
  Hashcode insert(Key x, std::uint64_t, std::span<const Key>, std::uint64_t&) { return d_.insert(x); }
  void erase(Key x) { d_.erase(x); }
  std::optional<Hashcode> code(Key x) const { return d_.find_code(x); }
  std::optional<bool> member(Key x) const { return d_.member(x); }
  std::optional<std::uint64_t> payload(Key) const { return std::nullopt; }
  void update(Key, std::uint64_t) {}

 private:
  MembPhDict d_;
};

class PhAdapter {
 public:
  PhAdapter(const VerifyConfig& cfg, Rng& rng)
      : d_(PhOnlyParams{cfg.n, cfg.t, cfg.universe_bits, cfg.c, cfg.tunables}, rng) {}
  template <typename F>
  void observe(F&& f) { d_.set_relabel_observer(std::forward<F>(f)); }
  Hashcode insert(Key x, std::uint64_t, std::span<const Key> residents, std::uint64_t& forced) {
    for (;;) {
      try {
        return d_.insert(x);
      } catch (const DictError& e) {
        if (e.code() != Errc::kRebuildRequired) throw;
        ++forced;
        d_.rebuild(residents);
      }
    }
  }
  void erase(Key x) { d_.erase(x); }
  std::optional<Hashcode> code(Key x) const { return d_.hashcode(x); }
  std::optional<bool> member(Key) const { return std::nullopt; }
  std::optional<std::uint64_t> payload(Key) const { return std::nullopt; }
  void update(Key, std::uint64_t) {}

 private:
  PhOnlyDict d_;
};

template <typename Engine>
class RetrievalAdapter {
 public:
  RetrievalAdapter(const VerifyConfig& cfg, Rng& rng) : d_(params(cfg), cfg.payload_bits, rng) {}
  template <typename F>
  void observe(F&& f) { d_.set_relabel_observer(std::forward<F>(f)); }
  Hashcode insert(Key x, std::uint64_t payload, std::span<const Key> residents, std::uint64_t& forced) {
    for (;;) {
      try {
        return d_.insert(x, payload);
      } catch (const DictError& e) {
        if constexpr (RetrievalDict<Engine>::kHasMembership) {
          throw;
        } else {
          if (e.code() != Errc::kRebuildRequired) throw;
          ++forced;
          d_.rebuild(residents);
        }
      }
    }
  }
  void erase(Key x) { d_.erase(x); }
  std::optional<Hashcode> code(Key x) const {
    if constexpr (RetrievalDict<Engine>::kHasMembership) {
      return d_.engine().find_code(x);
    } else {
      return d_.engine().hashcode(x);
    }
  }
  std::optional<bool> member(Key x) const {
    if constexpr (RetrievalDict<Engine>::kHasMembership) return d_.engine().member(x);
    return std::nullopt;
  }
  std::optional<std::uint64_t> payload(Key x) const { return d_.retrieve(x); }
  void update(Key x, std::uint64_t payload) { d_.update(x, payload); }

 private:
  static typename RetrievalDict<Engine>::Params params(const VerifyConfig& cfg) {
    if constexpr (RetrievalDict<Engine>::kHasMembership) {
      return MembPhParams{cfg.n, cfg.t, cfg.universe_bits, cfg.tunables};
    } else {
      return PhOnlyParams{cfg.n, cfg.t, cfg.universe_bits, cfg.c, cfg.tunables};
    }
  }
  RetrievalDict<Engine> d_;
};

struct Entry {
  Hashcode code;
  std::uint64_t payload;
  std::size_t index;  // position in the live vector
};

template <typename Adapter>
class Driver {
 public:
  Driver(const VerifyConfig& cfg) : cfg_(cfg), rng_(split_seed(cfg.seed, 1)) {
    Rng build(split_seed(cfg.seed, 0));
    adapter_ = std::make_unique<Adapter>(cfg, build);
    adapter_->observe([this](Moves moves) { on_moves(moves); });
    range_ = cfg.n + cfg.t;
    sweep_every_ = std::max<std::uint64_t>(cfg.n, 1);
  }

  VerifyReport run() {
    const std::uint64_t fault_at = cfg_.ops / 2;
    for (std::uint64_t i = 0; i < cfg_.ops && report_.ok(); ++i) {
      ++report_.ops;
      try {
        step(i >= fault_at && cfg_.inject_fault && !fault_done_);
      } catch (const DictError& e) {
        fail(std::string("engine error: ") + e.what());
      }
      if ((i + 1) % sweep_every_ == 0 && report_.ok()) sweep();
    }
    if (report_.ok()) sweep();
    return report_;
  }

 private:
  void fail(std::string what) {
    if (report_.discrepancies++ == 0) report_.first_discrepancy = std::move(what);
  }

  Key fresh_key() {
    Key x;
    do {
      x = rng_.bits(cfg_.universe_bits);
    } while (shadow_.contains(x));
    return x;
  }

  void step(bool inject) {
    const std::uint64_t live = keys_.size();
    const std::uint64_t roll = rng_.below(100);
    if (live == 0 || (live < cfg_.n && roll < 40)) return do_insert(inject);
    if (roll < 70 || (live == cfg_.n && roll < 40)) return do_erase();
    if (roll < 85) return do_query(keys_[rng_.below(live)]);
    if (roll < 95) return do_update(keys_[rng_.below(live)]);
    do_absent_query();
  }

  void do_insert(bool inject) {
    const Key x = fresh_key();
    const std::uint64_t payload = rng_.bits(cfg_.payload_bits);
    Hashcode code = adapter_->insert(x, payload, keys_, report_.forced_rebuilds);
    ++report_.inserts;
    if (code >= range_) return fail("insert code " + std::to_string(code) + " outside [n + t]");
    if (auto it = owner_.find(code); it != owner_.end()) {
      return fail("insert code " + std::to_string(code) + " already held by key " + std::to_string(it->second));
    }
    if (inject) {
      code ^= 1;
      fault_done_ = true;
    }
    shadow_.emplace(x, Entry{code, payload, keys_.size()});
    owner_[code] = x;
    keys_.push_back(x);
  }

  void do_erase() {
    const Key x = keys_[rng_.below(keys_.size())];
    check(x);
    if (!report_.ok()) return;
    adapter_->erase(x);
    ++report_.erases;
    const Entry e = shadow_.at(x);
    owner_.erase(e.code);
    shadow_[keys_.back()].index = e.index;
    keys_[e.index] = keys_.back();
    keys_.pop_back();
    shadow_.erase(x);
    if (auto m = adapter_->member(x); m && *m) fail("erased key " + std::to_string(x) + " still a member");
  }

  void do_query(Key x) {
    ++report_.queries;
    check(x);
  }

  void check(Key x) {
    const Entry& e = shadow_.at(x);
    if (auto m = adapter_->member(x); m && !*m) return fail("resident key " + std::to_string(x) + " not a member");
    const auto code = adapter_->code(x);
    if (!code || *code != e.code) {
      return fail("key " + std::to_string(x) + " code " + (code ? std::to_string(*code) : "none") +
                  ", expected " + std::to_string(e.code));
    }
    if (auto p = adapter_->payload(x); p && *p != e.payload) {
      fail("key " + std::to_string(x) + " payload " + std::to_string(*p) + ", expected " + std::to_string(e.payload));
    }
  }

  void do_update(Key x) {
    if (cfg_.kind != StructureKind::kRetrievalMemb && cfg_.kind != StructureKind::kRetrievalPh) return do_query(x);
    const std::uint64_t payload = rng_.bits(cfg_.payload_bits);
    adapter_->update(x, payload);
    shadow_.at(x).payload = payload;
    do_query(x);
  }

  void do_absent_query() {
    ++report_.queries;
    const Key x = fresh_key();
    if (auto m = adapter_->member(x); m && *m) fail("non-resident key " + std::to_string(x) + " reported as member");
  }

  void sweep() {
    ++report_.sweeps;
    for (const Key x : keys_) {
      check(x);
      if (!report_.ok()) return;
    }
  }

  void on_moves(Moves moves) {
    ++report_.relabel_events;
    std::vector<std::pair<Key, Hashcode>> placed;
    placed.reserve(moves.size());
    for (const auto& [from, to] : moves) {
      const auto it = owner_.find(from);
      if (it == owner_.end()) return fail("rebuild moved unowned code " + std::to_string(from));
      placed.emplace_back(it->second, to);
    }
    for (const auto& m : moves) owner_.erase(m.first);
    for (const auto& [key, to] : placed) {
      if (to >= range_) return fail("rebuild code " + std::to_string(to) + " outside [n + t]");
      if (!owner_.emplace(to, key).second) return fail("rebuild produced duplicate code " + std::to_string(to));
      shadow_.at(key).code = to;
    }
  }

  VerifyConfig cfg_;
  Rng rng_;
  std::unique_ptr<Adapter> adapter_;
  std::uint64_t range_ = 0;
  std::uint64_t sweep_every_ = 1;
  bool fault_done_ = false;
  std::unordered_map<Key, Entry> shadow_;
  std::unordered_map<Hashcode, Key> owner_;
  std::vector<Key> keys_;
  VerifyReport report_;
};

template <typename Adapter>
VerifyReport drive(const VerifyConfig& cfg) {
  return Driver<Adapter>(cfg).run();
}

}  // namespace

VerifyReport run_verify(const VerifyConfig& cfg) {
  if (cfg.universe_bits < 64 && cfg.n >= (std::uint64_t{1} << cfg.universe_bits)) {
    throw DictError(Errc::kInvalidParams, "verify needs n < u so fresh keys exist");
  }
  if (cfg.payload_bits > PayloadStore::kMaxWidth) throw DictError(Errc::kInvalidParams, "payload width > 64");
  switch (cfg.kind) {
    case StructureKind::kMembPh: return drive<MembAdapter>(cfg);
    case StructureKind::kPhOnly: return drive<PhAdapter>(cfg);
    case StructureKind::kRetrievalMemb: return drive<RetrievalAdapter<MembPhDict>>(cfg);
    case StructureKind::kRetrievalPh: return drive<RetrievalAdapter<PhOnlyDict>>(cfg);
    case StructureKind::kQhf: break;
  }
  throw DictError(Errc::kInvalidParams, "verify does not apply to kind qhf");
}

}  // namespace qdict
