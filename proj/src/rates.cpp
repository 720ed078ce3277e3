#include "pir/rates.hpp"

#include <iomanip>
#include <sstream>

#include "pir/rng.hpp"

namespace pir {

std::string to_string(CapacityKind k) {
  return k == CapacityKind::General ? "general" : "scalar-linear";
}

CapacityResult capacity(Setting setting, CapacityKind kind, std::uint16_t K, std::uint16_t M) {
  CapacityResult r{setting, kind, K, M, Rational(0), false};
  const bool model_one = model_of(setting) == Model::I;
  if (model_one ? !(M >= 1 && M + 1 <= K) : !(M >= 2 && M <= K))
    throw ParamError(to_string(setting) + " requires " +
                     (model_one ? "1 <= M <= K-1" : "2 <= M <= K") + ", got K=" +
                     std::to_string(K) + " M=" + std::to_string(M));
  switch (setting) {
    case Setting::PcsiI:
      r.value = Rational(1, K - M);
      break;
    case Setting::PcsiII:
      r.value = Rational(1, K - M + 1);
      // only the lower bound is known for small M without the linearity restriction
      r.open = kind == CapacityKind::General && 2 * M <= K + 1;
      break;
    case Setting::CsiI:
      r.value = Rational(1, (K + M) / (M + 1));
      break;
    case Setting::CsiII:
      r.value = (M == 2 || M == K) ? Rational(1) : Rational(1, 2);
      break;
  }
  return r;
}

Rational measured_rate(const Answer& a) {
  if (a.symbols.empty()) throw ParamError("rate of an empty answer");
  return Rational(1, a.symbols.size());
}

std::uint16_t smallest_field(Setting setting, std::uint16_t K, std::uint16_t M) {
  std::uint32_t need = 2;
  switch (setting) {
    case Setting::PcsiI: need = std::max<std::uint32_t>(K, 2); break;
    case Setting::PcsiII: need = std::max<std::uint32_t>(K, 3); break;
    case Setting::CsiI: need = 2; break;
    case Setting::CsiII: need = rsc_case_of(K, M) >= 3 ? 3 : 2; break;
  }
  while (!is_prime(need)) ++need;
  return static_cast<std::uint16_t>(need);
}

std::vector<TableCell> capacity_table(std::uint16_t K_min, std::uint16_t K_max,
                                      std::uint64_t seed) {
  std::vector<TableCell> cells;
  Rng rng(seed);
  for (auto setting : {Setting::PcsiI, Setting::PcsiII, Setting::CsiI, Setting::CsiII}) {
    const bool model_one = model_of(setting) == Model::I;
    for (std::uint16_t K = std::max<std::uint16_t>(K_min, 2); K <= K_max; ++K) {
      const std::uint16_t lo = model_one ? 1 : 2;
      const std::uint16_t hi = model_one ? K - 1 : K;
      for (std::uint16_t M = lo; M <= hi; ++M) {
        const auto q = smallest_field(setting, K, M);
        const auto p = params_for(setting, K, M, q, 1);
        const auto inst = sample_instance(p, rng);
        const auto prepared = prepare_query(setting, p, inst.secret, rng);
        const auto ans = answer(prepared.query, inst.database);
        const bool ok = decode(ans, prepared.state, inst.side_info) == inst.demanded();
        for (auto kind : {CapacityKind::General, CapacityKind::ScalarLinear})
          cells.push_back({capacity(setting, kind, K, M), q, measured_rate(ans), ok});
      }
    }
  }
  return cells;
}

std::string format_table_text(const std::vector<TableCell>& cells) {
  std::ostringstream os;
  os << std::left << std::setw(8) << "setting" << std::setw(15) << "kind" << std::right
     << std::setw(4) << "K" << std::setw(4) << "M" << std::setw(5) << "q" << "  " << std::left
     << std::setw(14) << "capacity" << std::setw(10) << "measured" << "decoded\n";
  for (const auto& c : cells) {
    const auto cap = c.capacity.open ? "open >= " + to_fraction(c.capacity.value)
                                     : to_fraction(c.capacity.value);
    os << std::left << std::setw(8) << to_string(c.capacity.setting) << std::setw(15)
       << to_string(c.capacity.kind) << std::right << std::setw(4) << c.capacity.K << std::setw(4)
       << c.capacity.M << std::setw(5) << c.q << "  " << std::left << std::setw(14) << cap
       << std::setw(10) << to_fraction(c.measured) << (c.decoded ? "yes" : "NO") << '\n';
  }
  return os.str();
}

std::string format_table_csv(const std::vector<TableCell>& cells) {
  std::ostringstream os;
  os << "setting,kind,K,M,capacity_num,capacity_den,open_flag,measured_num,measured_den\n";
  for (const auto& c : cells) {
    os << to_string(c.capacity.setting) << ',' << to_string(c.capacity.kind) << ','
       << c.capacity.K << ',' << c.capacity.M << ','
       << boost::multiprecision::numerator(c.capacity.value) << ','
       << boost::multiprecision::denominator(c.capacity.value) << ','
       << (c.capacity.open ? 1 : 0) << ',' << boost::multiprecision::numerator(c.measured) << ','
       << boost::multiprecision::denominator(c.measured) << '\n';
  }
  return os.str();
}

}  // namespace pir
