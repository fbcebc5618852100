// Command-line surface over the library: sequence tables, ledger builds,
// the apparition sieve, indicator tables, ring checks, the index model,
// the first-order protocol, and the appendix reports.

#include <fstream>
#include <iostream>
#include <optional>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "eds/session.hpp"

using namespace eds;
using nlohmann::json;

namespace {

std::string rat_str(const Rat& q) {
  return den(q) == 1 ? num(q).get_str() : num(q).get_str() + "/" + den(q).get_str();
}

json quad_json(const Quadruple& q) {
  return json{{"U", rat_str(q.U)}, {"V", rat_str(q.V)}, {"X", rat_str(q.X)}, {"Y", rat_str(q.Y)}};
}

json witness_json(const Witness& w) {
  return json{{"k2", w.k2},
              {"k3", w.k3},
              {"q2", quad_json(w.q2)},
              {"q3", quad_json(w.q3)},
              {"A2", w.p2.A.get_str()},
              {"B2", w.p2.B.get_str()},
              {"A3", w.p3.A.get_str()},
              {"B3", w.p3.B.get_str()},
              {"C", rat_str(w.C)}};
}

Witness witness_from_json(const json& j) {
  Witness w;
  w.k2 = j.at("k2").get<long>();
  w.k3 = j.at("k3").get<long>();
  auto rd = [](const json& v) { return parse_rat(v.get<std::string>()); };
  w.q2 = Quadruple{rd(j.at("q2").at("U")), rd(j.at("q2").at("V")), rd(j.at("q2").at("X")),
                   rd(j.at("q2").at("Y"))};
  w.q3 = Quadruple{rd(j.at("q3").at("U")), rd(j.at("q3").at("V")), rd(j.at("q3").at("X")),
                   rd(j.at("q3").at("Y"))};
  w.p2 = ReducedPair{Int(j.at("A2").get<std::string>()), Int(j.at("B2").get<std::string>())};
  w.p3 = ReducedPair{Int(j.at("A3").get<std::string>()), Int(j.at("B3").get<std::string>())};
  w.C = parse_rat(j.at("C").get<std::string>());
  return w;
}

void emit(const RunConfig& rc, const json& payload, const std::string& text) {
  if (rc.json)
    std::cout << payload.dump(2) << "\n";
  else
    std::cout << text;
}

std::string verdict_text(bool v) { return v ? "true" : "false"; }

json transcript_json(const Transcript& tr) {
  json a = json::array();
  for (const auto& line : tr) a.push_back(line);
  return a;
}

std::string entries_text(Session& s, unsigned long n) {
  const IndexFactorization& fx = s.ledger.at(n);
  std::ostringstream out;
  bool first = true;
  for (const auto& [p, e] : fx.bad) {
    if (!first) out << " * ";
    out << p.get_str() << "^" << e << "(bad)";
    first = false;
  }
  for (const auto& [id, e] : fx.entries) {
    const Atom& a = s.ledger.atom(id);
    if (!first) out << " * ";
    if (a.kind == AtomKind::PrimitiveCofactor)
      out << "C" << a.origin << "[" << digits10(a.value) << "d]^" << e;
    else
      out << a.value.get_str() << "^" << e;
    first = false;
  }
  if (first) out << "1";
  return out.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"elliptic divisibility model toolkit"};
  app.require_subcommand(0, 1);
  app.fallthrough();

  RunConfig rc;
  std::string a_str = "0", b_str = "-2", gen_str = "3/1,5/1";
  std::string challenge_atom = "19";
  unsigned long nmax = 48, budget = 1'000'000, rho_cap = 1ul << 26;
  int mr_rounds = 64;

  app.add_option("--a", a_str, "curve coefficient a")->envname("EDSMODEL_A");
  app.add_option("--b", b_str, "curve coefficient b")->envname("EDSMODEL_B");
  app.add_option("--gen", gen_str, "generator as num/den,num/den")->envname("EDSMODEL_GEN");
  app.add_option("--nmax", nmax, "materialization bound")->envname("EDSMODEL_NMAX");
  app.add_option("--budget", budget, "trial-division bound")->envname("EDSMODEL_BUDGET");
  app.add_option("--rho-cap", rho_cap, "rho iteration cap per cofactor")
      ->envname("EDSMODEL_RHO_CAP");
  app.add_option("--mr-rounds", mr_rounds, "Miller-Rabin rounds")->envname("EDSMODEL_MR_ROUNDS");
  app.add_option("--qmax", rc.qmax, "apparition sieve bound")->envname("EDSMODEL_QMAX");
  app.add_option("--m1", rc.protocol.m1, "protocol constant m1")->envname("EDSMODEL_M1");
  app.add_option("--challenge-atom", challenge_atom, "challenger's indicator prime")
      ->envname("EDSMODEL_CHALLENGE_ATOM");
  app.add_option("--m0-horizon", rc.m0_horizon, "prime-power horizon for m0")
      ->envname("EDSMODEL_M0_HORIZON");
  app.add_option("--ledger", rc.ledger_path, "ledger file path")->envname("EDSMODEL_LEDGER");
  app.add_flag("--json", rc.json, "emit JSON")->envname("EDSMODEL_JSON");

  auto* seq_cmd = app.add_subcommand("seq", "table of multiples and denominator factorizations");
  unsigned long seq_n = 8;
  seq_cmd->add_option("--nmax", seq_n, "rows to print");

  auto* ledger_cmd = app.add_subcommand("ledger", "factor ledger operations");
  auto* ledger_build = ledger_cmd->add_subcommand("build", "build indices 1..nmax and persist");
  auto* ledger_show = ledger_cmd->add_subcommand("show", "print one built index");
  unsigned long show_n = 6;
  ledger_show->add_option("--n", show_n, "index to show");

  auto* appar_cmd = app.add_subcommand("apparition", "CSV table of (q, n_q, base_val)");

  auto* ind_cmd = app.add_subcommand("indicators", "CSV table of indicator atoms");
  unsigned long lmax = 48;
  ind_cmd->add_option("--lmax", lmax, "prime-power bound");

  auto* ring_cmd = app.add_subcommand("ring", "W-integer semantics");
  auto* ring_check = ring_cmd->add_subcommand("check", "membership / divides / coprime");
  std::string ring_op = "member", ring_x, ring_y;
  ring_check->add_option("--op", ring_op, "member|divides|coprime")->required();
  ring_check->add_option("x", ring_x, "first rational")->required();
  ring_check->add_option("y", ring_y, "second rational");

  auto* model_cmd = app.add_subcommand("model", "index-model relations");
  auto* m_encode = model_cmd->add_subcommand("encode", "canonical quadruple of k");
  auto* m_decode = model_cmd->add_subcommand("decode", "index of a quadruple");
  auto* m_plus = model_cmd->add_subcommand("plus", "k1 + k2 = k3");
  auto* m_divide = model_cmd->add_subcommand("divide", "k1 | k2");
  auto* m_times = model_cmd->add_subcommand("times", "k1 * k2 = k3");
  auto* m_square = model_cmd->add_subcommand("square", "k4 = k1^2 by the divisor gadget");
  long mk1 = 0, mk2 = 0, mk3 = 0;
  std::vector<std::string> quad_args;
  m_encode->add_option("k", mk1, "index")->required();
  m_decode->add_option("quad", quad_args, "U V X Y")->expected(4);
  m_plus->add_option("k1", mk1)->required();
  m_plus->add_option("k2", mk2)->required();
  m_plus->add_option("k3", mk3)->required();
  m_divide->add_option("k1", mk1)->required();
  m_divide->add_option("k2", mk2)->required();
  m_times->add_option("k1", mk1)->required();
  m_times->add_option("k2", mk2)->required();
  m_times->add_option("k3", mk3)->required();
  m_square->add_option("k1", mk1)->required();

  auto* fo_cmd = app.add_subcommand("fo", "first-order protocol");
  auto* fo_prove = fo_cmd->add_subcommand("prove", "witness for z = z0^2 against b");
  auto* fo_verify = fo_cmd->add_subcommand("verify", "check a witness");
  auto* fo_test = fo_cmd->add_subcommand("test", "integer test for z0");
  long fo_z0 = 0, fo_k1 = 0;
  std::string fo_b, fo_z, fo_witness, fo_witness_out, fo_test_z;
  fo_prove->add_option("z0", fo_z0)->required();
  fo_prove->add_option("b", fo_b)->required();
  fo_prove->add_option("--witness-out", fo_witness_out, "write the witness JSON here");
  fo_verify->add_option("z", fo_z)->required();
  fo_verify->add_option("k1", fo_k1)->required();
  fo_verify->add_option("b", fo_b)->required();
  fo_verify->add_option("--witness", fo_witness, "witness JSON path")->required();
  fo_test->add_option("z0", fo_test_z)->required();

  auto* density_cmd = app.add_subcommand("density", "indicator census rows");
  std::string xs_str = "10,100,1000,10000,100000,1000000";
  density_cmd->add_option("--xs", xs_str, "comma-separated census bounds");
  auto* hasse_cmd = app.add_subcommand("hasse", "Hasse-bound certificate rows");

  CLI11_PARSE(app, argc, argv);

  try {
    rc.curve.a = Int(a_str);
    rc.curve.b = Int(b_str);
    auto comma = gen_str.find(',');
    if (comma == std::string::npos) fail(Errc::ConfigInvalid, "--gen wants num/den,num/den");
    rc.curve.gen_x = parse_rat(gen_str.substr(0, comma));
    rc.curve.gen_y = parse_rat(gen_str.substr(comma + 1));
    rc.curve.n_max = nmax;
    rc.curve.budget = FactorBudget{budget, rho_cap, mr_rounds};
    rc.protocol.challenge_atom = Int(challenge_atom);

    Session s(rc);

    if (seq_cmd->parsed()) {
      unsigned long hi = std::min(seq_n, rc.curve.n_max);
      json rows = json::array();
      std::ostringstream text;
      for (unsigned long n = 1; n <= hi; ++n) {
        s.ledger.build(n);
        const auto rec = s.seq.multiple((long)n);
        rows.push_back({{"n", n},
                        {"x", rat_str(rec.point.x())},
                        {"y", rat_str(rec.point.y())},
                        {"den_factorization", entries_text(s, n)}});
        text << n << "\tx = " << rat_str(rec.point.x()) << "\n\ty = " << rat_str(rec.point.y())
             << "\n\tden = " << entries_text(s, n) << "\n";
      }
      emit(rc, rows, text.str());
      s.save_ledger();
      return 0;
    }

    if (ledger_build->parsed()) {
      s.ledger.build_range(rc.curve.n_max);
      s.save_ledger();
      json j{{"indices", rc.curve.n_max},
             {"atoms", s.ledger.atoms().size()},
             {"ledger", rc.ledger_path.empty() ? "(not persisted)" : rc.ledger_path}};
      emit(rc, j,
           "built 1.." + std::to_string(rc.curve.n_max) + ": " +
               std::to_string(s.ledger.atoms().size()) + " atoms\n");
      return 0;
    }
    if (ledger_show->parsed()) {
      s.ledger.build(show_n);
      json j{{"n", show_n},
             {"den_factorization", entries_text(s, show_n)},
             {"primitive_cofactor", s.ledger.primitive_cofactor(show_n).get_str()}};
      emit(rc, j,
           "den_x(" + std::to_string(show_n) + ") = " + entries_text(s, show_n) +
               "\nprimitive cofactor = " + s.ledger.primitive_cofactor(show_n).get_str() + "\n");
      return 0;
    }

    if (appar_cmd->parsed()) {
      auto table = s.appar.table(rc.qmax);
      std::ostringstream text;
      text << "q,n_q,base_val\n";
      json rows = json::array();
      for (const auto& r : table) {
        text << r.q.get_str() << "," << r.n_q << ","
             << (r.base_val ? std::to_string(*r.base_val) : "") << "\n";
        rows.push_back({{"q", r.q.get_str()},
                        {"n_q", r.n_q},
                        {"base_val", r.base_val ? json(*r.base_val) : json(nullptr)}});
      }
      emit(rc, rows, text.str());
      return 0;
    }

    if (ind_cmd->parsed()) {
      std::ostringstream text;
      text << "ell,j,atom,digits\n";
      json rows = json::array();
      for (unsigned long lj = 2; lj <= std::min(lmax, rc.curve.n_max); ++lj) {
        unsigned long ell;
        unsigned j;
        if (!is_prime_power(lj, &ell, &j)) continue;
        const Atom& a = s.sets.indicator(ell, j);
        std::string shown = a.kind == AtomKind::PrimitiveCofactor
                                ? "UNSPLIT(" + std::to_string(a.origin) + ")"
                                : a.value.get_str();
        text << ell << "," << j << "," << shown << "," << digits10(a.value) << "\n";
        rows.push_back({{"ell", ell}, {"j", j}, {"atom", shown}, {"digits", digits10(a.value)}});
      }
      emit(rc, rows, text.str());
      s.save_ledger();
      return 0;
    }

    if (ring_check->parsed()) {
      s.ledger.build_range(rc.curve.n_max);
      Rat x = parse_rat(ring_x);
      json j;
      std::ostringstream text;
      if (ring_op == "member") {
        RingView v = s.ring.view(x);
        Membership m = s.ring.membership_of(v);
        json vals = json::object();
        for (const auto& [id, val] : v.indicator)
          vals[s.ledger.atom(id).value.get_str()] = val;
        j = json{{"op", "member"},
                 {"x", rat_str(x)},
                 {"verdict", to_string(m)},
                 {"indicator_valuations", vals}};
        text << "member(" << rat_str(x) << ") = " << to_string(m) << "\n";
      } else {
        if (ring_y.empty()) fail(Errc::ConfigInvalid, "this op needs two rationals");
        Rat y = parse_rat(ring_y);
        std::vector<std::string> tr;
        bool v = ring_op == "divides" ? s.ring.divides(x, y, &tr) : s.ring.coprime(x, y, &tr);
        j = json{{"op", ring_op},
                 {"x", rat_str(x)},
                 {"y", rat_str(y)},
                 {"verdict", v},
                 {"witness", tr}};
        text << ring_op << "(" << rat_str(x) << ", " << rat_str(y) << ") = " << verdict_text(v)
             << "\n";
        for (const auto& line : tr) text << "  " << line << "\n";
      }
      emit(rc, j, text.str());
      return 0;
    }

    if (model_cmd->parsed()) {
      s.ledger.build_range(rc.curve.n_max);
      if (m_encode->parsed()) {
        Quadruple q = s.model.encode(mk1);
        emit(rc, quad_json(q),
             "(" + rat_str(q.U) + ", " + rat_str(q.V) + ", " + rat_str(q.X) + ", " + rat_str(q.Y) +
                 ")\n");
        return 0;
      }
      if (m_decode->parsed()) {
        Quadruple q{parse_rat(quad_args[0]), parse_rat(quad_args[1]), parse_rat(quad_args[2]),
                    parse_rat(quad_args[3])};
        long k = s.model.decode(q);
        emit(rc, json{{"k", k}}, "k = " + std::to_string(k) + "\n");
        return 0;
      }
      if (m_square->parsed()) {
        SquareResult res = s.model.square_of_index(s.model.encode(mk1));
        json j{{"k1", mk1},
               {"k4", res.k4},
               {"raw_survivors", res.raw_survivors},
               {"transcript", transcript_json(res.transcript)}};
        std::ostringstream text;
        text << "square(" << mk1 << ") = " << res.k4 << "\n";
        for (long sv : res.raw_survivors) text << "  raw survivor: " << sv << "\n";
        emit(rc, j, text.str());
        return 0;
      }
      Transcript tr;
      bool v = false;
      std::string what;
      if (m_plus->parsed()) {
        v = s.model.plus_check(s.model.encode(mk1), s.model.encode(mk2), s.model.encode(mk3), &tr);
        what = "plus";
      } else if (m_divide->parsed()) {
        v = s.model.divide_check(s.model.encode(mk1), s.model.encode(mk2), &tr);
        what = "divide";
      } else if (m_times->parsed()) {
        v = s.model.times_check(s.model.encode(mk1), s.model.encode(mk2), s.model.encode(mk3), &tr);
        what = "times";
      } else {
        std::cout << model_cmd->help();
        return 0;
      }
      json j{{"verdict", v}, {"transcript", transcript_json(tr)}};
      std::ostringstream text;
      text << what << " = " << verdict_text(v) << "\n";
      for (const auto& line : tr) text << "  " << line << "\n";
      emit(rc, j, text.str());
      return 0;
    }

    if (fo_cmd->parsed()) {
      s.ledger.build_range(rc.curve.n_max);
      if (fo_prove->parsed()) {
        Witness w = s.fo.prove(fo_z0, parse_rat(fo_b));
        json j = witness_json(w);
        if (!fo_witness_out.empty()) {
          std::ofstream out(fo_witness_out);
          out << j.dump(2) << "\n";
        }
        emit(rc, j,
             "witness: k2 = " + std::to_string(w.k2) + ", k3 = " + std::to_string(w.k3) +
                 ", C = " + rat_str(w.C) + "\n");
        return 0;
      }
      if (fo_verify->parsed()) {
        std::ifstream in(fo_witness);
        if (!in) fail(Errc::CorruptFile, "cannot open witness file " + fo_witness);
        json wj;
        in >> wj;
        Witness w = witness_from_json(wj);
        VerifyResult vr = s.fo.verify(parse_rat(fo_z), fo_k1, parse_rat(fo_b), w);
        json j{{"verdict", vr.ok},
               {"failed", vr.failed},
               {"transcript", transcript_json(vr.transcript)}};
        std::ostringstream text;
        text << "verify = " << verdict_text(vr.ok);
        if (!vr.ok) text << " (failed at " << vr.failed << ")";
        text << "\n";
        emit(rc, j, text.str());
        return 0;
      }
      if (fo_test->parsed()) {
        IntegerTestResult res = s.fo.integer_test(parse_rat(fo_test_z));
        json j{{"verdict", res.accepted}, {"transcript", transcript_json(res.transcript)}};
        std::ostringstream text;
        text << "integer_test(" << fo_test_z << ") = " << verdict_text(res.accepted) << "\n";
        for (const auto& line : res.transcript) text << "  " << line << "\n";
        emit(rc, j, text.str());
        return 0;
      }
      std::cout << fo_cmd->help();
      return 0;
    }

    if (density_cmd->parsed()) {
      s.ledger.build_range(rc.curve.n_max);
      std::vector<unsigned long> xs;
      std::stringstream ss(xs_str);
      std::string tok;
      while (std::getline(ss, tok, ',')) xs.push_back(std::stoul(tok));
      auto rows = s.density.census(xs);
      std::ostringstream text;
      text << "X,indicator_count,prime_count,ratio,implied_constant\n";
      json jrows = json::array();
      for (const auto& r : rows) {
        std::ostringstream c;
        c << std::fixed << std::setprecision(6) << r.implied_constant;
        text << r.X << "," << r.indicator_count << "," << r.prime_count << "," << rat_str(r.ratio)
             << "," << c.str() << "\n";
        jrows.push_back({{"X", r.X},
                         {"indicator_count", r.indicator_count},
                         {"prime_count", r.prime_count},
                         {"ratio", rat_str(r.ratio)},
                         {"implied_constant", c.str()}});
      }
      emit(rc, jrows, text.str());
      return 0;
    }

    if (hasse_cmd->parsed()) {
      s.ledger.build_range(rc.curve.n_max);
      auto rows = s.density.hasse_check();
      std::ostringstream text;
      text << "origin,value,certificate,ok\n";
      json jrows = json::array();
      bool all_ok = true;
      for (const auto& r : rows) {
        text << r.origin << "," << r.value.get_str() << "," << (r.via_budget ? "budget" : "direct")
             << "," << (r.ok ? "ok" : "VIOLATION") << "\n";
        jrows.push_back({{"origin", r.origin},
                         {"value", r.value.get_str()},
                         {"certificate", r.via_budget ? "budget" : "direct"},
                         {"ok", r.ok}});
        all_ok = all_ok && r.ok;
      }
      text << (all_ok ? "all certificates hold\n" : "VIOLATIONS PRESENT\n");
      emit(rc, jrows, text.str());
      return 0;
    }

    std::cout << app.help();
    return 0;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
