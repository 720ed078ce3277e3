#include "pir/model.hpp"

#include <algorithm>

#include "pir/rng.hpp"

namespace pir {

void ProblemParams::validate() const {
  if (!is_prime(q)) throw ParamError("q = " + std::to_string(q) + " is not a prime below 2^16");
  if (l < 1) throw ParamError("extension degree l must be >= 1");
  if (K < 1) throw ParamError("K must be >= 1");
  if (model == Model::I && !(M >= 1 && M + 1 <= K))
    throw ParamError("Model I requires 1 <= M <= K-1");
  if (model == Model::II && !(M >= 2 && M <= K))
    throw ParamError("Model II requires 2 <= M <= K");
}

bool Secret::demand_in_support() const {
  return std::binary_search(support.begin(), support.end(), demand);
}

std::size_t Secret::position_of(std::uint16_t j) const {
  auto it = std::lower_bound(support.begin(), support.end(), j);
  if (it == support.end() || *it != j)
    throw IndexError("index " + std::to_string(j) + " not in support");
  return static_cast<std::size_t>(it - support.begin());
}

const Fq& Secret::coeff_of(std::uint16_t j) const { return coeffs.at(position_of(j)); }

void validate_secret(const ProblemParams& p, const Secret& s) {
  if (s.support.size() != p.M) throw ParamError("support size differs from M");
  if (s.coeffs.size() != s.support.size()) throw ParamError("|C| != |S|");
  if (!std::is_sorted(s.support.begin(), s.support.end()) ||
      std::adjacent_find(s.support.begin(), s.support.end()) != s.support.end())
    throw ParamError("support must be strictly ascending");
  for (auto i : s.support)
    if (i < 1 || i > p.K) throw IndexError("support index out of range");
  if (s.demand < 1 || s.demand > p.K) throw IndexError("demand index out of range");
  for (const auto& c : s.coeffs) {
    if (c.modulus() != p.q) throw ModulusMismatch("coefficient outside GF(q)");
    if (c.is_zero()) throw InvalidCoefficient("side-information coefficients must be nonzero");
  }
  if (s.demand_in_support() != (p.model == Model::II))
    throw ModelViolation(p.model == Model::I ? "Model I requires W not in S"
                                             : "Model II requires W in S");
}

Database sample_database(const ProblemParams& p, Rng& rng) {
  Database db;
  db.reserve(p.K);
  const auto field = p.field();
  for (std::uint16_t i = 0; i < p.K; ++i) db.push_back(sample_message(field, p.l, rng));
  return db;
}

Message compute_side_info(const Database& db, const std::vector<std::uint16_t>& support,
                          const std::vector<Fq>& coeffs) {
  if (support.size() != coeffs.size()) throw ParamError("|C| != |S|");
  if (db.empty()) throw ParamError("empty database");
  Message y = Message::zero(PrimeField(db.front().modulus()), db.front().degree());
  for (std::size_t k = 0; k < support.size(); ++k) {
    if (support[k] < 1 || support[k] > db.size()) throw IndexError("support index out of range");
    if (coeffs[k].is_zero()) throw InvalidCoefficient("zero side-information coefficient");
    y += msg_scale(coeffs[k], db[support[k] - 1u]);
  }
  return y;
}

void Instance::validate() const {
  params.validate();
  validate_secret(params, secret);
  if (database.size() != params.K) throw ParamError("database size differs from K");
  for (const auto& x : database)
    if (x.degree() != params.l || x.modulus() != params.q)
      throw ParamError("database message has wrong shape");
  if (compute_side_info(database, secret.support, secret.coeffs) != side_info)
    throw ParamError("side information inconsistent with (S, C)");
}

Secret sample_secret(const ProblemParams& p, Rng& rng) {
  p.validate();
  std::vector<std::uint16_t> all(p.K);
  for (std::uint16_t i = 0; i < p.K; ++i) all[i] = static_cast<std::uint16_t>(i + 1);
  rng.shuffle(all.begin(), all.end());

  Secret s;
  s.support.assign(all.begin(), all.begin() + p.M);
  std::sort(s.support.begin(), s.support.end());
  const auto field = p.field();
  for (std::uint16_t k = 0; k < p.M; ++k) s.coeffs.push_back(sample_nonzero(field, rng));
  if (p.model == Model::I)
    s.demand = all[p.M + rng.uniform(p.K - p.M)];
  else
    s.demand = s.support[rng.uniform(p.M)];
  return s;
}

Instance sample_instance(const ProblemParams& p, Rng& rng) {
  Secret s = sample_secret(p, rng);
  Database db = sample_database(p, rng);
  Message y = compute_side_info(db, s.support, s.coeffs);
  return Instance{p, std::move(db), std::move(s), std::move(y)};
}

std::vector<std::vector<std::uint16_t>> subsets(std::uint16_t K, std::uint16_t M) {
  std::vector<std::vector<std::uint16_t>> out;
  if (M > K) return out;
  std::vector<std::uint16_t> cur(M);
  for (std::uint16_t i = 0; i < M; ++i) cur[i] = static_cast<std::uint16_t>(i + 1);
  while (true) {
    out.push_back(cur);
    int i = static_cast<int>(M) - 1;
    while (i >= 0 && cur[i] == K - M + i + 1) --i;
    if (i < 0) break;
    ++cur[i];
    for (int j = i + 1; j < M; ++j) cur[j] = static_cast<std::uint16_t>(cur[j - 1] + 1);
  }
  return out;
}

std::vector<Secret> all_secrets(std::uint16_t K, std::uint16_t M, Model model, std::uint16_t q) {
  const PrimeField field(q);
  const auto nz = field.nonzero_elements();
  std::vector<Secret> out;
  for (const auto& S : subsets(K, M)) {
    for (std::uint16_t w = 1; w <= K; ++w) {
      const bool inside = std::binary_search(S.begin(), S.end(), w);
      if (inside != (model == Model::II)) continue;
      // odometer over (F_q^×)^M
      std::vector<std::size_t> digit(M, 0);
      while (true) {
        Secret s{w, S, {}};
        for (auto d : digit) s.coeffs.push_back(nz[d]);
        out.push_back(std::move(s));
        std::size_t i = M;
        while (i > 0 && ++digit[i - 1] == nz.size()) digit[--i] = 0;
        if (i == 0) break;
      }
    }
  }
  return out;
}

std::string to_string(Model m) { return m == Model::I ? "I" : "II"; }

void to_json(nlohmann::json& j, const ProblemParams& p) {
  j = {{"K", p.K}, {"M", p.M}, {"model", to_string(p.model)}, {"q", p.q}, {"l", p.l}};
}

void from_json(const nlohmann::json& j, ProblemParams& p) {
  p.K = j.at("K").get<std::uint16_t>();
  p.M = j.at("M").get<std::uint16_t>();
  p.model = j.at("model").get<std::string>() == "II" ? Model::II : Model::I;
  p.q = j.at("q").get<std::uint16_t>();
  p.l = j.at("l").get<std::uint16_t>();
}

void to_json(nlohmann::json& j, const Secret& s) {
  std::vector<std::uint16_t> c;
  for (const auto& x : s.coeffs) c.push_back(x.value());
  j = {{"W", s.demand}, {"S", s.support}, {"C", c}};
}

namespace {
std::vector<std::uint16_t> coords_of(const Message& m) {
  std::vector<std::uint16_t> v;
  for (const auto& c : m.coords()) v.push_back(c.value());
  return v;
}

Message message_from(const nlohmann::json& j, const PrimeField& field) {
  std::vector<Fq> coords;
  for (const auto& v : j) coords.push_back(field(v.get<std::uint32_t>()));
  return Message(std::move(coords));
}
}  // namespace

nlohmann::json instance_to_json(const Instance& inst) {
  nlohmann::json db = nlohmann::json::array();
  for (const auto& x : inst.database) db.push_back(coords_of(x));
  return {{"params", inst.params},
          {"W", inst.secret.demand},
          {"S", inst.secret.support},
          {"C", nlohmann::json(inst.secret)["C"]},
          {"Y", coords_of(inst.side_info)},
          {"database", db}};
}

Instance instance_from_json(const nlohmann::json& j) {
  auto params = j.at("params").get<ProblemParams>();
  const auto field = params.field();
  Instance inst{params, {}, {}, Message::zero(field, params.l)};
  for (const auto& x : j.at("database")) inst.database.push_back(message_from(x, field));
  inst.secret.demand = j.at("W").get<std::uint16_t>();
  inst.secret.support = j.at("S").get<std::vector<std::uint16_t>>();
  for (const auto& c : j.at("C")) inst.secret.coeffs.push_back(field(c.get<std::uint32_t>()));
  inst.side_info = message_from(j.at("Y"), field);
  inst.validate();
  return inst;
}

}  // namespace pir
