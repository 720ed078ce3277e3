#include "pir/protocols.hpp"

#include <algorithm>
#include <cctype>
#include <set>

namespace pir {

Model model_of(Setting s) noexcept {
  return (s == Setting::PcsiI || s == Setting::CsiI) ? Model::I : Model::II;
}

Privacy privacy_of(Setting s) noexcept {
  return (s == Setting::PcsiI || s == Setting::PcsiII) ? Privacy::WS : Privacy::W;
}

std::string to_string(Setting s) {
  switch (s) {
    case Setting::PcsiI: return "pcsi1";
    case Setting::PcsiII: return "pcsi2";
    case Setting::CsiI: return "csi1";
    case Setting::CsiII: return "csi2";
  }
  return "?";
}

std::string to_string(Privacy p) { return p == Privacy::W ? "w" : "ws"; }

std::optional<Setting> parse_setting(std::string_view name) {
  std::string s(name);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  s.erase(std::remove(s.begin(), s.end(), '-'), s.end());
  if (s == "pcsi1" || s == "pcsii") return Setting::PcsiI;
  if (s == "pcsi2" || s == "pcsiii") return Setting::PcsiII;
  if (s == "csi1" || s == "csii") return Setting::CsiI;
  if (s == "csi2" || s == "csiii") return Setting::CsiII;
  return std::nullopt;
}

ProblemParams params_for(Setting s, std::uint16_t K, std::uint16_t M, std::uint16_t q,
                         std::uint16_t l) {
  return ProblemParams{K, M, model_of(s), q, l};
}

Fq evaluation_point(std::uint16_t j, const PrimeField& field) { return field(j - 1u); }

std::vector<Fq> poly_from_roots(std::span<const Fq> roots, const PrimeField& field) {
  std::vector<Fq> p{field.one()};
  for (const auto& r : roots) {
    // p(x)·(x - r)
    std::vector<Fq> next(p.size() + 1, field.zero());
    for (std::size_t i = 0; i < p.size(); ++i) {
      next[i + 1] += p[i];
      next[i] -= r * p[i];
    }
    p = std::move(next);
  }
  return p;
}

Fq poly_eval(std::span<const Fq> coeffs, const Fq& x) {
  Fq acc = x * PrimeField(x.modulus()).zero();
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * x + *it;
  return acc;
}

std::size_t expected_download(Setting s, std::uint16_t K, std::uint16_t M) {
  switch (s) {
    case Setting::PcsiI: return static_cast<std::size_t>(K - M);
    case Setting::PcsiII: return static_cast<std::size_t>(K - M + 1);
    case Setting::CsiI: return mpc_block_count(K, M);
    case Setting::CsiII: {
      const int c = rsc_case_of(K, M);
      return (c == 1 || c == 4) ? 1 : 2;
    }
  }
  return 0;
}

FqMatrix coefficient_rows(const Query& q, std::uint16_t K, const PrimeField& field) {
  if (const auto* g = std::get_if<GrsQuery>(&q)) {
    if (g->coeffs.cols() != K) throw ShapeMismatch("GRS query column count != K");
    if (g->coeffs.field() != field) throw ModulusMismatch("query over a different field");
    return g->coeffs;
  }
  const auto& ic = std::get<IndexCoeffQuery>(q);
  if (ic.parts.empty()) throw ShapeMismatch("query has no parts");
  FqMatrix m(ic.parts.size(), K, field);
  for (std::size_t r = 0; r < ic.parts.size(); ++r) {
    const auto& part = ic.parts[r];
    if (part.indices.size() != part.coeffs.size()) throw ShapeMismatch("|U| != |V|");
    for (std::size_t k = 0; k < part.indices.size(); ++k) {
      const auto idx = part.indices[k];
      if (idx < 1 || idx > K) throw IndexError("query index out of range");
      m(r, idx - 1u) += part.coeffs[k];
    }
  }
  return m;
}

Answer answer(const Query& q, const Database& db) {
  if (db.empty()) throw ParamError("empty database");
  const PrimeField field(db.front().modulus());
  const auto rows = coefficient_rows(q, static_cast<std::uint16_t>(db.size()), field);
  Answer a;
  a.symbols.reserve(rows.rows());
  for (std::size_t r = 0; r < rows.rows(); ++r) {
    Message sym = Message::zero(field, db.front().degree());
    for (std::size_t j = 0; j < rows.cols(); ++j)
      if (!rows(r, j).is_zero()) sym += msg_scale(rows(r, j), db[j]);
    a.symbols.push_back(std::move(sym));
  }
  return a;
}

Message decode(const Answer& a, const UserState& st, const Message& side_info) {
  if (a.symbols.size() != st.weights.size())
    throw ShapeMismatch("answer has " + std::to_string(a.symbols.size()) + " symbols, expected " +
                        std::to_string(st.weights.size()));
  if (st.divisor.is_zero()) throw InternalError("zero division coefficient in user state");
  Message z = msg_scale(st.side_info_coeff, side_info);
  for (std::size_t k = 0; k < a.symbols.size(); ++k) z += msg_scale(st.weights[k], a.symbols[k]);
  return msg_scale(st.divisor.inv(), z);
}

namespace {

void check_part(const QueryPart& part, const ProblemParams& p, std::size_t size) {
  if (part.indices.size() != size || part.coeffs.size() != size)
    throw ShapeMismatch("part has " + std::to_string(part.indices.size()) + " indices, expected " +
                        std::to_string(size));
  std::set<std::uint16_t> seen;
  for (auto i : part.indices) {
    if (i < 1 || i > p.K) throw IndexError("query index out of range");
    if (!seen.insert(i).second) throw ShapeMismatch("repeated index within a part");
  }
  for (const auto& c : part.coeffs) {
    if (c.modulus() != p.q) throw ModulusMismatch("query coefficient outside GF(q)");
    if (c.is_zero()) throw InvalidCoefficient("zero coefficient in query");
  }
}

}  // namespace

void check_query_shape(Setting s, const ProblemParams& p, const Query& q) {
  const std::size_t download = expected_download(s, p.K, p.M);
  if (s == Setting::PcsiI || s == Setting::PcsiII) {
    const auto* g = std::get_if<GrsQuery>(&q);
    if (!g) throw ShapeMismatch("GRS setting expects a coefficient-matrix query");
    if (g->coeffs.cols() != p.K || g->coeffs.rows() != download)
      throw ShapeMismatch("GRS query shape mismatch");
    if (g->coeffs.field().order() != p.q) throw ModulusMismatch("query over a different field");
    return;
  }
  const auto* ic = std::get_if<IndexCoeffQuery>(&q);
  if (!ic) throw ShapeMismatch("index/coefficient query expected");
  if (ic->parts.size() != download) throw ShapeMismatch("wrong number of query parts");
  if (s == Setting::CsiI) {
    std::set<std::uint16_t> covered;
    for (const auto& part : ic->parts) {
      check_part(part, p, p.M + 1u);
      if (part.coeffs != ic->parts.front().coeffs) throw ShapeMismatch("parts must share V");
      covered.insert(part.indices.begin(), part.indices.end());
    }
    if (covered.size() != p.K) throw ShapeMismatch("parts do not cover every message");
    return;
  }
  const int c = rsc_case_of(p.K, p.M);
  const std::size_t size = c == 1 ? 1u : c == 2 ? p.M - 1u : c == 3 ? p.M : p.K;
  for (const auto& part : ic->parts) {
    check_part(part, p, size);
    if (part.coeffs != ic->parts.front().coeffs) throw ShapeMismatch("parts must share V");
  }
}

PreparedQuery prepare_query(Setting setting, const ProblemParams& p, const Secret& s, Rng& rng) {
  if (p.model != model_of(setting))
    throw ParamError("setting " + to_string(setting) + " requires Model " +
                     to_string(model_of(setting)));
  switch (setting) {
    case Setting::PcsiI: return grs_query(p, s, rng);
    case Setting::PcsiII: return mgrs_query(p, s, rng);
    case Setting::CsiI: return mpc_query(p, s, rng);
    case Setting::CsiII: return rsc_query(p, s, rng);
  }
  throw ParamError("unknown setting");
}

}  // namespace pir
