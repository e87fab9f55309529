// Microbenchmarks for the hot paths: quantum products, polynomial gcds over
// the series field, valuation sequences of loop powers, component inversion,
// and the certified field splitting.

#include <benchmark/benchmark.h>

#include <cstdint>

#include "qhom/quantum.hpp"
#include "qhom/seidel.hpp"
#include "qhom/subalgebra.hpp"

namespace {

using namespace qhom;
using B_ = BasisId;

void BM_quantum_product(benchmark::State& state) {
  const ManifoldPreset p = ManifoldPreset::sphere_product(Rational(2));
  const Algebra alg(p);
  const LatticeVector A = p.named_exponent("A");
  const LatticeVector B = p.named_exponent("B");
  const QuantumClass a = QuantumClass::term(B_::H1, {}, Rational(1)) +
                         QuantumClass::term(B_::P, -A, Rational(1, 2));
  const QuantumClass b = QuantumClass::term(B_::H2, {}, Rational(3)) +
                         QuantumClass::term(B_::P, -B, Rational(1));
  for (auto _ : state) {
    benchmark::DoNotOptimize(quantum_product(alg, a, b));
  }
}
BENCHMARK(BM_quantum_product);

void BM_ext_euclid(benchmark::State& state) {
  const ManifoldPreset p = ManifoldPreset::blow_up(Rational(1, 4));
  const PolyL f = structure_polynomial(p).poly;
  const PolyL fp = f.derivative();
  for (auto _ : state) {
    benchmark::DoNotOptimize(ext_euclid(f, fp));
  }
}
BENCHMARK(BM_ext_euclid);

void BM_val_sequence_warm(benchmark::State& state) {
  const ManifoldPreset p = ManifoldPreset::sphere_product(Rational(2));
  const SeidelElement s = seidel_inverse(p, default_power_floor(p, 20));
  for (auto _ : state) {
    benchmark::DoNotOptimize(val_sequence(p, s, QuantumClass::unit(), 20, 6));
  }
}
BENCHMARK(BM_val_sequence_warm);

void BM_invert_in_subalgebra_warm(benchmark::State& state) {
  const ManifoldPreset p = ManifoldPreset::blow_up(Rational(1, 4));
  const StructurePolynomial sp = structure_polynomial(p);
  const PolyL rep{LaurentScalar::x_power(0) + LaurentScalar::x_power(-1),
                  LaurentScalar::x_power(0), LaurentScalar::x_power(2),
                  LaurentScalar::x_power(0)};
  const SubalgebraElement g = make_element(sp, rep);
  for (auto _ : state) {
    benchmark::DoNotOptimize(invert_in_subalgebra(p, g, 0, -40));
  }
}
BENCHMARK(BM_invert_in_subalgebra_warm);

void BM_split_fields_cold(benchmark::State& state) {
  const ManifoldPreset p = ManifoldPreset::blow_up(Rational(1, 4));
  std::int64_t i = 0;
  // A fresh floor each iteration keeps the certificate cache out of the
  // measurement.
  for (auto _ : state) {
    benchmark::DoNotOptimize(split_fields(p, -40 - (i++ % 16)));
  }
}
BENCHMARK(BM_split_fields_cold);

}  // namespace

BENCHMARK_MAIN();
