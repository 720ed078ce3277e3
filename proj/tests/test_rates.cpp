#include <doctest.h>

#include <sstream>

#include "pir/rates.hpp"

using namespace pir;

namespace {

constexpr auto General = CapacityKind::General;
constexpr auto Linear = CapacityKind::ScalarLinear;

/// Download count per setting, written from the capacity formulas.
unsigned symbols(Setting s, unsigned K, unsigned M) {
  switch (s) {
    case Setting::PcsiI: return K - M;
    case Setting::PcsiII: return K - M + 1;
    case Setting::CsiI: {
      unsigned n = 0;
      while (n * (M + 1) < K) ++n;
      return n;
    }
    case Setting::CsiII: return (M == 2 || M == K) ? 1 : 2;
  }
  return 0;
}

Rational cap(Setting s, unsigned K, unsigned M, CapacityKind kind = Linear) {
  return capacity(s, kind, K, M).value;
}

}  // namespace

TEST_CASE("capacity formulas") {
  CHECK(cap(Setting::PcsiI, 4, 2) == Rational(1, 2));
  CHECK(cap(Setting::CsiI, 5, 2) == Rational(1, 2));
  CHECK(cap(Setting::CsiII, 6, 6) == 1);
  CHECK(cap(Setting::CsiII, 2, 2) == 1);
  CHECK(cap(Setting::PcsiI, 10, 3) == Rational(1, 7));
  CHECK(cap(Setting::PcsiII, 10, 3) == Rational(1, 8));
  CHECK(cap(Setting::CsiI, 10, 3) == Rational(1, 3));
  CHECK(cap(Setting::CsiII, 10, 3) == Rational(1, 2));

  const auto open = capacity(Setting::PcsiII, General, 10, 3);
  CHECK(open.open);
  CHECK(open.value == Rational(1, 8));
  CHECK_FALSE(capacity(Setting::PcsiII, Linear, 10, 3).open);
  const auto settled = capacity(Setting::PcsiII, General, 10, 6);
  CHECK_FALSE(settled.open);
  CHECK(settled.value == Rational(1, 5));

  for (unsigned K = 2; K <= 30; ++K)
    for (auto s : {Setting::PcsiI, Setting::PcsiII, Setting::CsiI, Setting::CsiII}) {
      const unsigned lo = model_of(s) == Model::I ? 1 : 2;
      const unsigned hi = model_of(s) == Model::I ? K - 1 : K;
      for (unsigned M = lo; M <= hi; ++M) {
        for (auto kind : {General, Linear}) {
          const auto r = capacity(s, kind, K, M);
          CHECK(r.value == Rational(1, symbols(s, K, M)));
          CHECK(r.value > 0);
          CHECK(r.value <= 1);
          CHECK(r.open == (s == Setting::PcsiII && kind == General && 2 * M <= K + 1));
        }
      }
    }
}

TEST_CASE("capacity rejects parameters outside each setting's range") {
  CHECK_THROWS_AS(capacity(Setting::PcsiI, Linear, 4, 4), ParamError);
  CHECK_THROWS_AS(capacity(Setting::PcsiI, Linear, 4, 0), ParamError);
  CHECK_THROWS_AS(capacity(Setting::CsiII, Linear, 4, 1), ParamError);
  CHECK_THROWS_AS(capacity(Setting::PcsiII, General, 4, 5), ParamError);
}

TEST_CASE("W-privacy is never costlier than (W, S)-privacy") {
  for (unsigned K = 2; K <= 30; ++K) {
    for (unsigned M = 1; M <= K - 1; ++M) {
      const auto csi = cap(Setting::CsiI, K, M), pcsi = cap(Setting::PcsiI, K, M);
      CHECK(csi >= pcsi);
      // ⌈K/(M+1)⌉ = K-M also at M = K-2, where both equal 2
      CHECK((csi == pcsi) == (M + 2 >= K));
    }
    CHECK(cap(Setting::CsiI, K, K - 1) == cap(Setting::PcsiI, K, K - 1));
  }
  for (unsigned K = 3; K <= 30; ++K) {
    CHECK(cap(Setting::CsiII, K, K) == cap(Setting::PcsiII, K, K));
    // at K = 3 the M = K-1 = 2 column falls in the rate-1 branch instead
    if (K >= 4) CHECK(cap(Setting::CsiII, K, K - 1) == cap(Setting::PcsiII, K, K - 1));
    for (unsigned M = 2; M + 2 <= K; ++M) CHECK(cap(Setting::CsiII, K, M) > cap(Setting::PcsiII, K, M));
  }
  CHECK(cap(Setting::CsiII, 3, 2) == 1);
  CHECK(cap(Setting::PcsiII, 3, 2) == Rational(1, 2));
}

TEST_CASE("measured rate") {
  const PrimeField f(5);
  Answer a{{Message({f(1)}), Message({f(2)}), Message({f(3)})}};
  CHECK(measured_rate(a) == Rational(1, 3));
  a.symbols.erase(a.symbols.begin() + 1, a.symbols.end());
  CHECK(measured_rate(a) == 1);
  a.symbols.clear();
  CHECK_THROWS_AS(measured_rate(a), ParamError);
}

TEST_CASE("smallest fields") {
  CHECK(smallest_field(Setting::PcsiI, 4, 2) == 5);
  CHECK(smallest_field(Setting::PcsiI, 8, 2) == 11);
  CHECK(smallest_field(Setting::PcsiII, 2, 2) == 3);
  CHECK(smallest_field(Setting::CsiI, 9, 3) == 2);
  CHECK(smallest_field(Setting::CsiII, 6, 3) == 2);
  CHECK(smallest_field(Setting::CsiII, 6, 5) == 3);
  CHECK(smallest_field(Setting::CsiII, 6, 6) == 3);
}

TEST_CASE("capacity table matches live runs for K up to 10") {
  const auto cells = capacity_table(2, 10, 3);
  std::size_t expected = 0;
  for (unsigned K = 2; K <= 10; ++K) expected += 2 * ((K - 1) + (K - 1) + (K - 1) + (K - 1));
  CHECK(cells.size() == expected);
  for (const auto& c : cells) {
    CAPTURE(to_string(c.capacity.setting));
    CAPTURE(c.capacity.K);
    CAPTURE(c.capacity.M);
    CHECK(c.decoded);
    CHECK(c.measured == Rational(1, symbols(c.capacity.setting, c.capacity.K, c.capacity.M)));
    CHECK(c.measured == c.capacity.value);
  }

  const auto csv = format_table_csv(cells);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(line == "setting,kind,K,M,capacity_num,capacity_den,open_flag,measured_num,measured_den");
  CHECK(csv.find("pcsi2,general,10,3,1,8,1,1,8\n") != std::string::npos);
  CHECK(csv.find("pcsi2,general,10,6,1,5,0,1,5\n") != std::string::npos);
  CHECK(csv.find("csi1,scalar-linear,10,3,1,3,0,1,3\n") != std::string::npos);
  const auto text = format_table_text(cells);
  CHECK(text.find("open >= 1/8") != std::string::npos);
}
