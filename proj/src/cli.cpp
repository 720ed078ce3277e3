#include "pir/cli.hpp"

#include <csignal>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <pthread.h>

#include "pir/audit.hpp"
#include "pir/client.hpp"
#include "pir/rates.hpp"
#include "pir/rng.hpp"
#include "pir/server.hpp"
#include "pir/wire.hpp"

namespace pir {

namespace {

constexpr int kOk = 0, kViolation = 1, kUsage = 2, kRuntime = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Setting setting_or_throw(const std::string& name) {
  auto s = parse_setting(name);
  if (!s) throw UsageError("unknown setting '" + name + "' (expected pcsi1, pcsi2, csi1 or csi2)");
  return *s;
}

std::string protocol_name(Setting s) {
  switch (s) {
    case Setting::PcsiI: return "Specialized GRS Code";
    case Setting::PcsiII: return "Modified Specialized GRS Code";
    case Setting::CsiI: return "Modified Partition-and-Code";
    case Setting::CsiII: return "Randomized Selection-and-Code";
  }
  return "?";
}

std::string join(const std::vector<std::uint16_t>& v, const char* sep = ",") {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? sep : "") + std::to_string(v[i]);
  return s;
}

std::string join(std::span<const Fq> v, const char* sep = ",") {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? sep : "") + std::to_string(v[i].value());
  return s;
}

/// "c_1 name_1 + c_2 name_2 ..." with unit coefficients elided and q-1
/// written as a subtraction.
std::string combination(const std::vector<std::pair<Fq, std::string>>& terms,
                        bool use_minus = true) {
  std::string s;
  for (const auto& [c, name] : terms) {
    if (c.is_zero()) continue;
    const bool minus = use_minus && c.value() == c.modulus() - 1 && c.modulus() > 2;
    const auto mag = minus ? std::uint16_t{1} : c.value();
    if (s.empty())
      s += minus ? "-" : "";
    else
      s += minus ? " - " : " + ";
    if (mag != 1) s += std::to_string(mag);
    s += name;
  }
  return s.empty() ? "0" : s;
}

std::string row_combination(std::span<const Fq> row) {
  std::vector<std::pair<Fq, std::string>> terms;
  for (std::size_t j = 0; j < row.size(); ++j) terms.push_back({row[j], "X_" + std::to_string(j + 1)});
  return combination(terms, false);
}

std::string describe_query(const Query& q) {
  std::ostringstream os;
  if (const auto* g = std::get_if<GrsQuery>(&q)) {
    for (std::size_t r = 0; r < g->coeffs.rows(); ++r)
      os << "  row " << r + 1 << ": (" << join(g->coeffs.row(r)) << ")\n";
  } else {
    const auto& ic = std::get<IndexCoeffQuery>(q);
    for (std::size_t i = 0; i < ic.parts.size(); ++i)
      os << "  Q_" << i + 1 << " = (U={" << join(ic.parts[i].indices) << "}, V={"
         << join(ic.parts[i].coeffs) << "})\n";
  }
  return os.str();
}

std::string describe_decode(const UserState& st) {
  std::vector<std::pair<Fq, std::string>> terms;
  for (std::size_t k = 0; k < st.weights.size(); ++k)
    terms.push_back({st.weights[k], "A_" + std::to_string(k + 1)});
  terms.push_back({st.side_info_coeff, "Y"});
  auto s = "(" + combination(terms) + ")";
  if (st.divisor.value() != 1) s += " / " + std::to_string(st.divisor.value());
  return s;
}

struct WorkedExample {
  Setting setting;
  ProblemParams params;
  Secret secret;
  std::function<PreparedQuery()> build;
};

WorkedExample worked_example(int n) {
  auto secret = [](std::uint16_t w, std::vector<std::uint16_t> s, std::vector<std::uint32_t> c,
                   const PrimeField& f) {
    Secret out{w, std::move(s), {}};
    for (auto x : c) out.coeffs.push_back(f(x));
    return out;
  };
  switch (n) {
    case 1: {
      auto p = params_for(Setting::PcsiI, 4, 2, 5);
      const PrimeField f(5);
      auto s = secret(1, {2, 3}, {1, 1}, f);
      return {Setting::PcsiI, p, s, [=] { return build_grs_query(p, s, GrsChoices{{f(1), f(2)}}); }};
    }
    case 2: {
      auto p = params_for(Setting::PcsiII, 4, 2, 5);
      const PrimeField f(5);
      auto s = secret(1, {1, 2}, {1, 1}, f);
      return {Setting::PcsiII, p, s,
              [=] { return build_mgrs_query(p, s, MgrsChoices{f(4), {f(1), f(3)}}); }};
    }
    case 3: {
      auto p = params_for(Setting::CsiI, 5, 2, 3);
      const PrimeField f(3);
      auto s = secret(1, {2, 3}, {1, 2}, f);
      return {Setting::CsiI, p, s,
              [=] { return build_mpc_query(p, s, MpcChoices{4, {3, 2}, {4, 5}, f(2)}); }};
    }
    case 4: {
      auto p = params_for(Setting::CsiII, 6, 2, 3);
      const PrimeField f(3);
      auto s = secret(1, {1, 2}, {2, 1}, f);
      RscChoices ch;
      ch.selected = 2;
      return {Setting::CsiII, p, s, [=] { return build_rsc_query(p, s, ch); }};
    }
    case 5: {
      auto p = params_for(Setting::CsiII, 6, 3, 3);
      const PrimeField f(3);
      auto s = secret(1, {1, 2, 3}, {2, 1, 2}, f);
      RscChoices ch;
      ch.include_demand = true;
      ch.picked = {4};
      ch.swapped = true;
      return {Setting::CsiII, p, s, [=] { return build_rsc_query(p, s, ch); }};
    }
    default:
      throw UsageError("--example must be 1..5");
  }
}

int cmd_demo(std::ostream& out, const std::string& setting_name, std::uint16_t K, std::uint16_t M,
             std::uint16_t q, std::uint16_t l, std::uint64_t seed, int example) {
  Rng rng(seed);
  Setting setting;
  ProblemParams p;
  Secret s;
  PreparedQuery prepared{GrsQuery{FqMatrix(1, 1, PrimeField(2))},
                         UserState{Setting::PcsiI, {}, Fq(0, 2), Fq(1, 2), {}, 0}};
  if (example > 0) {
    auto ex = worked_example(example);
    setting = ex.setting;
    p = ex.params;
    p.l = l;
    s = ex.secret;
    prepared = ex.build();
    if (!setting_name.empty() && setting_or_throw(setting_name) != setting)
      throw UsageError("example " + std::to_string(example) + " uses setting " + to_string(setting));
  } else {
    setting = setting_or_throw(setting_name);
    p = params_for(setting, K, M, q, l);
    p.validate();
    s = sample_secret(p, rng);
  }

  const auto db = sample_database(p, rng);
  const auto y = compute_side_info(db, s.support, s.coeffs);
  if (example == 0) prepared = prepare_query(setting, p, s, rng);
  const auto ans = answer(prepared.query, db);
  const auto x = decode(ans, prepared.state, y);
  const auto rows = coefficient_rows(prepared.query, p.K, p.field());

  std::vector<std::pair<Fq, std::string>> y_terms;
  for (std::size_t k = 0; k < s.support.size(); ++k)
    y_terms.push_back({s.coeffs[k], "X_" + std::to_string(s.support[k])});

  out << "setting " << to_string(setting) << " (" << protocol_name(setting) << "), K=" << p.K
      << " M=" << p.M << " q=" << p.q << " l=" << p.l << " seed=" << seed << "\n";
  out << "demand W=" << s.demand << ", support S={" << join(s.support) << "}, C=("
      << join(s.coeffs) << ")\n";
  out << "side information Y = " << combination(y_terms, false) << "\n";
  if (!prepared.state.poly.empty()) out << "p(x) coefficients: (" << join(prepared.state.poly) << ")\n";
  out << "query:\n" << describe_query(prepared.query);
  out << "query bytes: " << wire::to_hex(wire::encode_query(prepared.query)) << "\n";
  out << "answer:\n";
  for (std::size_t r = 0; r < rows.rows(); ++r)
    out << "  A_" << r + 1 << " = " << row_combination(rows.row(r)) << "\n";
  out << "decode: X_" << s.demand << " = " << describe_decode(prepared.state) << "\n";
  out << "recovered X_" << s.demand << " = [" << join(x.coords()) << "], stored ["
      << join(db[s.demand - 1u].coords()) << "], " << (x == db[s.demand - 1u] ? "match" : "MISMATCH")
      << "\n";
  const auto rate = measured_rate(ans);
  out << "rate " << (rate == 1 ? std::string("1") : to_fraction(rate)) << "\n";
  return x == db[s.demand - 1u] ? kOk : kRuntime;
}

int cmd_audit(std::ostream& out, const std::string& setting_name, std::uint16_t K,
              std::uint16_t M, std::uint16_t q, const std::string& privacy, std::uint64_t cap) {
  const auto setting = setting_or_throw(setting_name);
  Privacy kind;
  if (privacy == "w")
    kind = Privacy::W;
  else if (privacy == "ws")
    kind = Privacy::WS;
  else
    throw UsageError("--privacy must be w or ws");
  const auto report = check_privacy(setting, params_for(setting, K, M, q, 1), kind, cap);
  out << to_json(report).dump(2) << "\n";
  return report.holds ? kOk : kViolation;
}

std::uint64_t fnv1a(std::uint64_t h, const wire::Bytes& b) {
  for (auto c : b) h = (h ^ c) * 0x100000001b3ULL;
  return h;
}

std::vector<std::uint16_t> feasible_supports(Setting s, std::uint16_t K, std::uint16_t q) {
  std::vector<std::uint16_t> out;
  const bool model_one = model_of(s) == Model::I;
  for (std::uint16_t M = model_one ? 1 : 2; M <= (model_one ? K - 1 : K); ++M)
    if (q >= smallest_field(s, K, M)) out.push_back(M);
  return out;
}

int cmd_fetch_random(std::ostream& out, const std::string& host, std::uint16_t port,
                     const Database& db, std::size_t runs, std::uint64_t seed, bool verbose) {
  const auto K = static_cast<std::uint16_t>(db.size());
  const auto q = db.front().modulus();
  const auto l = static_cast<std::uint16_t>(db.front().degree());
  Rng rng(seed);
  std::uint64_t digest = 0xcbf29ce484222325ULL;
  std::size_t ok = 0, done = 0;
  const Setting order[] = {Setting::PcsiI, Setting::PcsiII, Setting::CsiI, Setting::CsiII};
  for (std::size_t i = 0; done < runs; ++i) {
    const auto setting = order[i % 4];
    const auto Ms = feasible_supports(setting, K, q);
    if (Ms.empty()) {
      if (i >= 4 && done == 0) throw ParamError("no setting runs on this database");
      continue;
    }
    const auto p = params_for(setting, K, Ms[rng.uniform(Ms.size())], q, l);
    const auto s = sample_secret(p, rng);
    RetrieveConfig cfg{host, port, setting, p, s, compute_side_info(db, s.support, s.coeffs), rng.next()};
    const auto res = retrieve(cfg);
    const bool good = res.message == db[s.demand - 1u];
    ok += good;
    ++done;
    digest = fnv1a(fnv1a(digest, res.transcript.sent), res.transcript.received);
    if (verbose)
      out << to_string(setting) << " M=" << p.M << " W=" << s.demand << " symbols="
          << res.transcript.symbols << " rate=" << to_fraction(res.transcript.rate)
          << (good ? " ok" : " WRONG") << "\n";
  }
  std::ostringstream hex;
  hex << std::hex << std::setw(16) << std::setfill('0') << digest;
  out << ok << "/" << runs << " retrievals decoded correctly\n";
  out << "transcript digest " << hex.str() << "\n";
  return ok == runs ? kOk : kViolation;
}

std::vector<Fq> to_elements(const std::vector<std::uint32_t>& v, std::uint16_t q) {
  std::vector<Fq> out;
  for (auto x : v) {
    if (x >= q) throw UsageError("value " + std::to_string(x) + " is not below q");
    out.push_back(Fq(x, q));
  }
  return out;
}

void wait_for_termination() {
  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  int sig = 0;
  sigwait(&set, &sig);
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Single-server private information retrieval with coded side information"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  std::string setting_name, privacy, db_path, listen, addr, out_path, port_file;
  std::uint16_t K = 4, M = 2, q = 5, l = 1, K_max = 10, K_min = 2, W = 0;
  std::uint64_t seed = 1, cap = kDefaultEnumerationCap;
  int example = 0;
  bool csv = false, transcript = false, verbose = false;
  std::size_t random_runs = 0;
  std::vector<std::uint16_t> S;
  std::vector<std::uint32_t> C, Y;

  auto* demo = app.add_subcommand("demo", "Run one retrieval in-process and print every step");
  demo->add_option("setting", setting_name, "pcsi1 | pcsi2 | csi1 | csi2");
  demo->add_option("--K", K, "number of messages");
  demo->add_option("--M", M, "side-information support size");
  demo->add_option("--q", q, "prime field size");
  demo->add_option("--l", l, "message length in field elements");
  demo->add_option("--seed", seed, "random seed");
  demo->add_option("--example", example, "replay worked run 1..5 with its fixed choices")
      ->check(CLI::Range(1, 5));

  auto* audit = app.add_subcommand("audit", "Exact privacy audit by exhaustive enumeration");
  audit->add_option("setting", setting_name, "pcsi1 | pcsi2 | csi1 | csi2")->required();
  audit->add_option("--K", K)->required();
  audit->add_option("--M", M)->required();
  audit->add_option("--q", q)->required();
  audit->add_option("--privacy", privacy, "w | ws")->required();
  audit->add_option("--cap", cap, "maximum number of enumerated branches");

  auto* table = app.add_subcommand("table", "Capacity table with live protocol runs");
  table->add_option("--K-max", K_max)->required();
  table->add_option("--K-min", K_min);
  table->add_option("--seed", seed);
  table->add_flag("--csv", csv, "emit CSV instead of aligned text");

  auto* gen = app.add_subcommand("gen-db", "Write a random database file");
  gen->add_option("--K", K)->required();
  gen->add_option("--q", q)->required();
  gen->add_option("--l", l);
  gen->add_option("--seed", seed);
  gen->add_option("--out", out_path)->required();

  auto* serve = app.add_subcommand("serve", "Serve a database file over TCP until SIGINT/SIGTERM");
  serve->add_option("--db", db_path)->required();
  serve->add_option("--listen", listen, "host:port (port 0 picks a free port)")->required();
  serve->add_option("--port-file", port_file, "write the bound port here once listening");

  auto* fetch = app.add_subcommand("fetch", "Privately retrieve a message from a server");
  fetch->add_option("address", addr, "host:port")->required();
  fetch->add_option("--setting", setting_name);
  fetch->add_option("--M", M);
  fetch->add_option("--W", W);
  fetch->add_option("--S", S)->delimiter(',');
  fetch->add_option("--C", C)->delimiter(',');
  fetch->add_option("--Y", Y, "side information coordinates")->delimiter(',');
  fetch->add_option("--K", K);
  fetch->add_option("--q", q);
  fetch->add_option("--l", l);
  fetch->add_option("--db", db_path, "client-side copy used to form Y and verify the result");
  fetch->add_option("--seed", seed);
  fetch->add_option("--random", random_runs, "run this many random retrievals (needs --db)");
  fetch->add_flag("--transcript", transcript, "print the raw transcript bytes");
  fetch->add_flag("--verbose", verbose);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kOk;
    }
    err << "usage error: " << e.what() << "\n" << "run with --help for usage\n";
    return kUsage;
  }

  try {
    if (*demo) {
      if (setting_name.empty() && example == 0) throw UsageError("demo needs a setting or --example");
      return cmd_demo(out, setting_name, K, M, q, l, seed, example);
    }
    if (*audit) return cmd_audit(out, setting_name, K, M, q, privacy, cap);
    if (*table) {
      if (K_max < 2 || K_min > K_max) throw UsageError("need 2 <= K-min <= K-max");
      const auto cells = capacity_table(K_min, K_max, seed);
      out << (csv ? format_table_csv(cells) : format_table_text(cells));
      bool all = true;
      for (const auto& c : cells)
        all = all && c.decoded && c.measured == capacity(c.capacity.setting,
                                                         CapacityKind::ScalarLinear,
                                                         c.capacity.K, c.capacity.M).value;
      return all ? kOk : kRuntime;
    }
    if (*gen) {
      auto p = ProblemParams{K, 1, Model::I, q, l};
      if (!is_prime(q) || K == 0 || l == 0) throw UsageError("need prime q, K >= 1, l >= 1");
      Rng rng(seed);
      wire::save_database(out_path, sample_database(p, rng));
      out << "wrote " << K << " messages over GF(" << q << ")^" << l << " to " << out_path << "\n";
      return kOk;
    }
    if (*serve) {
      auto db = wire::load_database(db_path);
      const auto [host, port] = parse_address(listen);
      sigset_t set;
      sigemptyset(&set);
      sigaddset(&set, SIGINT);
      sigaddset(&set, SIGTERM);
      pthread_sigmask(SIG_BLOCK, &set, nullptr);
      Server server(std::move(db));
      const auto bound = server.start(host, port);
      out << "listening on " << host << ":" << bound << std::endl;
      if (!port_file.empty()) {
        const auto tmp = port_file + ".tmp";
        std::ofstream(tmp) << bound << "\n";
        std::filesystem::rename(tmp, port_file);
      }
      wait_for_termination();
      server.stop();
      return kOk;
    }
    if (*fetch) {
      const auto [host, port] = parse_address(addr);
      std::optional<Database> db;
      if (!db_path.empty()) db = wire::load_database(db_path);
      if (random_runs > 0) {
        if (!db) throw UsageError("--random needs --db");
        return cmd_fetch_random(out, host, port, *db, random_runs, seed, verbose);
      }
      if (setting_name.empty() || W == 0 || S.empty() || C.empty())
        throw UsageError("fetch needs --setting, --W, --S and --C (or --random)");
      const auto setting = setting_or_throw(setting_name);
      if (db) {
        K = static_cast<std::uint16_t>(db->size());
        q = db->front().modulus();
        l = static_cast<std::uint16_t>(db->front().degree());
      }
      M = static_cast<std::uint16_t>(S.size());
      const auto p = params_for(setting, K, M, q, l);
      Secret s{W, S, to_elements(C, q)};
      std::sort(s.support.begin(), s.support.end());
      if (s.support != S) throw UsageError("--S must be ascending");
      validate_secret(p, s);
      Message y = db ? compute_side_info(*db, s.support, s.coeffs)
                     : (Y.empty() ? throw UsageError("fetch needs --Y or --db")
                                  : Message(to_elements(Y, q)));
      if (y.degree() != l) throw UsageError("--Y must have l coordinates");
      RetrieveConfig cfg{host, port, setting, p, s, y, seed};
      const auto res = retrieve(cfg);
      out << "X_" << W << " = [" << join(res.message.coords()) << "]\n";
      out << "downloaded " << res.transcript.symbols << " symbols, rate "
          << to_fraction(res.transcript.rate) << ", sent " << res.transcript.sent.size()
          << " bytes, received " << res.transcript.received.size() << " bytes\n";
      if (transcript) {
        out << "sent " << wire::to_hex(res.transcript.sent) << "\n";
        out << "received " << wire::to_hex(res.transcript.received) << "\n";
      }
      if (db) {
        const bool good = res.message == (*db)[W - 1u];
        out << "verified against local copy: " << (good ? "yes" : "NO") << "\n";
        return good ? kOk : kViolation;
      }
      return kOk;
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kRuntime;
  }
  return kUsage;
}

}  // namespace pir
