// Specialized GRS Code protocol and its Model II variant.

#include <algorithm>

#include "pir/protocols.hpp"
#include "pir/rng.hpp"

namespace pir {

namespace {

void require_field(const ProblemParams& p, std::uint16_t minimum) {
  if (p.q < minimum)
    throw FieldTooSmall("GF(" + std::to_string(p.q) + ") too small: need q >= " +
                        std::to_string(minimum));
}

std::vector<std::uint16_t> outside_support(const ProblemParams& p, const Secret& s) {
  std::vector<std::uint16_t> out;
  for (std::uint16_t j = 1; j <= p.K; ++j)
    if (!std::binary_search(s.support.begin(), s.support.end(), j)) out.push_back(j);
  return out;
}

/// Rows v_j ω_j^i for i = 0..rows-1.
FqMatrix grs_generator(const std::vector<Fq>& v, std::size_t rows, const PrimeField& field) {
  FqMatrix g(rows, v.size(), field);
  for (std::size_t j = 0; j < v.size(); ++j) {
    const Fq w = evaluation_point(static_cast<std::uint16_t>(j + 1), field);
    Fq power = field.one();
    for (std::size_t i = 0; i < rows; ++i) {
      g(i, j) = v[j] * power;
      power *= w;
    }
  }
  return g;
}

void assign_free(std::vector<std::optional<Fq>>& v, const std::vector<std::uint16_t>& free_idx,
                 const std::vector<Fq>& values, const ProblemParams& p) {
  if (values.size() != free_idx.size())
    throw ParamError("expected " + std::to_string(free_idx.size()) + " free multipliers");
  for (std::size_t k = 0; k < free_idx.size(); ++k) {
    if (values[k].modulus() != p.q) throw ModulusMismatch("multiplier outside GF(q)");
    if (values[k].is_zero()) throw InvalidCoefficient("multipliers must be nonzero");
    v[free_idx[k] - 1u] = values[k];
  }
}

std::vector<Fq> unwrap(const std::vector<std::optional<Fq>>& v) {
  std::vector<Fq> out;
  for (const auto& x : v) out.push_back(x.value());
  return out;
}

}  // namespace

PreparedQuery build_grs_query(const ProblemParams& p, const Secret& s, const GrsChoices& ch) {
  p.validate();
  if (p.model != Model::I) throw ModelViolation("Specialized GRS requires Model I");
  require_field(p, p.K);
  validate_secret(p, s);
  const auto field = p.field();

  std::vector<Fq> roots;
  for (std::uint16_t i = 1; i <= p.K; ++i)
    if (i != s.demand && !std::binary_search(s.support.begin(), s.support.end(), i))
      roots.push_back(evaluation_point(i, field));
  const auto poly = poly_from_roots(roots, field);

  std::vector<std::optional<Fq>> v(p.K);
  for (std::size_t k = 0; k < s.support.size(); ++k) {
    const auto j = s.support[k];
    v[j - 1u] = s.coeffs[k] / poly_eval(poly, evaluation_point(j, field));
  }
  assign_free(v, outside_support(p, s), ch.free_multipliers, p);
  const auto mult = unwrap(v);

  const Fq demand_coeff = mult[s.demand - 1u] * poly_eval(poly, evaluation_point(s.demand, field));
  UserState st{Setting::PcsiI, poly, -field.one(), demand_coeff, poly, 0};
  return {GrsQuery{grs_generator(mult, poly.size(), field)}, std::move(st)};
}

GrsChoices sample_grs_choices(const ProblemParams& p, const Secret& s, Rng& rng) {
  GrsChoices ch;
  const auto field = p.field();
  for (std::size_t k = 0, n = outside_support(p, s).size(); k < n; ++k)
    ch.free_multipliers.push_back(sample_nonzero(field, rng));
  return ch;
}

PreparedQuery grs_query(const ProblemParams& p, const Secret& s, Rng& rng) {
  return build_grs_query(p, s, sample_grs_choices(p, s, rng));
}

PreparedQuery build_mgrs_query(const ProblemParams& p, const Secret& s, const MgrsChoices& ch) {
  p.validate();
  if (p.model != Model::II) throw ModelViolation("Modified Specialized GRS requires Model II");
  require_field(p, std::max<std::uint16_t>(p.K, 3));
  validate_secret(p, s);
  const auto field = p.field();
  const Fq c_w = s.coeff_of(s.demand);
  if (ch.c.modulus() != p.q) throw ModulusMismatch("c outside GF(q)");
  if (ch.c.is_zero() || ch.c == c_w) throw InvalidCoefficient("c must lie in F_q^x minus {c_W}");

  const auto free_idx = outside_support(p, s);
  std::vector<Fq> roots;
  for (auto i : free_idx) roots.push_back(evaluation_point(i, field));
  const auto poly = poly_from_roots(roots, field);

  std::vector<std::optional<Fq>> v(p.K);
  for (std::size_t k = 0; k < s.support.size(); ++k) {
    const auto j = s.support[k];
    const Fq target = j == s.demand ? ch.c : s.coeffs[k];
    v[j - 1u] = target / poly_eval(poly, evaluation_point(j, field));
  }
  assign_free(v, free_idx, ch.free_multipliers, p);

  UserState st{Setting::PcsiII, poly, -field.one(), ch.c - c_w, poly, 0};
  return {GrsQuery{grs_generator(unwrap(v), poly.size(), field)}, std::move(st)};
}

MgrsChoices sample_mgrs_choices(const ProblemParams& p, const Secret& s, Rng& rng) {
  const auto field = p.field();
  const auto c_w = s.coeff_of(s.demand).value();
  // uniform over F_q^× ∖ {c_W}: draw from q-2 slots and skip over c_W
  auto v = 1 + rng.uniform(p.q - 2u);
  if (v >= c_w) ++v;
  MgrsChoices ch{field(v), {}};
  for (std::size_t k = 0, n = outside_support(p, s).size(); k < n; ++k)
    ch.free_multipliers.push_back(sample_nonzero(field, rng));
  return ch;
}

PreparedQuery mgrs_query(const ProblemParams& p, const Secret& s, Rng& rng) {
  p.validate();
  require_field(p, std::max<std::uint16_t>(p.K, 3));
  validate_secret(p, s);
  return build_mgrs_query(p, s, sample_mgrs_choices(p, s, rng));
}

}  // namespace pir
