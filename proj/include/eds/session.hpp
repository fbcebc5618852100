#pragma once

#include <filesystem>
#include <string>

#include "eds/apparition.hpp"
#include "eds/curve.hpp"
#include "eds/density.hpp"
#include "eds/firstorder.hpp"
#include "eds/ledger.hpp"
#include "eds/model.hpp"
#include "eds/primesets.hpp"
#include "eds/ring.hpp"

namespace eds {

struct RunConfig {
  CurveConfig curve;
  unsigned long qmax = 5000;
  ProtocolConfig protocol;
  unsigned long m0_horizon = 0;  // 0: use n_max
  std::string ledger_path;       // optional persistence target
  bool json = false;
};

/// Wires the whole stack over one curve configuration, reloading the
/// ledger from disk when a path with a matching fingerprint is given.
class Session {
 public:
  explicit Session(RunConfig rc)
      : config(std::move(rc)),
        seq(config.curve),
        appar(seq),
        ledger(make_ledger(config, seq)),
        sets(ledger, config.m0_horizon),
        ring(sets, appar),
        model(seq, sets, ring),
        fo(model, ring, sets, seq, config.protocol),
        density(sets) {}

  void save_ledger() {
    if (!config.ledger_path.empty()) ledger.save(config.ledger_path);
  }

  RunConfig config;
  CurveSeq seq;
  ApparitionOracle appar;
  Ledger ledger;
  PrimeSets sets;
  RingCtx ring;
  Model model;
  FirstOrder fo;
  Density density;

 private:
  static Ledger make_ledger(const RunConfig& rc, const CurveSeq& seq) {
    if (!rc.ledger_path.empty() && std::filesystem::exists(rc.ledger_path))
      return Ledger::load(rc.ledger_path, seq);
    return Ledger(seq);
  }
};

}  // namespace eds
