#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "test_support.hpp"

using namespace framelab;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("Gram matrix of the 120-degree triple", "[frame_core]") {
  const auto g = gram_matrix(tsup::mercedes()).entries;
  REQUIRE(g.size() == 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const double expected = i == j ? 1.0 : -0.5;
      CHECK_THAT(g.at(i, j), WithinAbs(expected, 1e-12));
    }
}

TEST_CASE("frame operator of the 120-degree triple is (3/2) I", "[frame_core]") {
  const auto op = frame_operator(tsup::mercedes());
  REQUIRE(op.entries.size() == 2);
  CHECK_THAT(op.entries.at(0, 0), WithinAbs(1.5, 1e-12));
  CHECK_THAT(op.entries.at(1, 1), WithinAbs(1.5, 1e-12));
  CHECK_THAT(op.entries.at(0, 1), WithinAbs(0.0, 1e-12));
  CHECK_THAT(op.trace, WithinAbs(3.0, 1e-12));
  CHECK_THAT(op.tight_constant, WithinAbs(1.5, 1e-12));
}

TEST_CASE("frame potential of {e1,e2,-e1,-e2} is 8", "[frame_core]") {
  const auto vs = tsup::square_frame();
  CHECK(frame_potential(vs) == 8.0);
  // Matches both the Gram and frame-operator Frobenius norms exactly here.
  CHECK(frobenius_norm2(gram_matrix(vs).entries) == 8.0);
  CHECK(frobenius_norm2(frame_operator(vs).entries) == 8.0);
}

TEST_CASE("frame potential equals squared HS norms of Gram and frame operator",
          "[frame_core]") {
  SplitMix64 gen(123);
  for (int trial = 0; trial < 50; ++trial) {
    const int d = 2 + static_cast<int>(gen.next_u64() % 4);       // 2..5
    const int n = 2 + static_cast<int>(gen.next_u64() % 11);      // 2..12
    const auto vs = random_system(d, n, NormConstraints(0.5, 2.0, 0.0), gen);
    const double fp = frame_potential(vs);
    CHECK_THAT(frobenius_norm2(gram_matrix(vs).entries), WithinRel(fp, 1e-9));
    CHECK_THAT(frobenius_norm2(frame_operator(vs).entries), WithinRel(fp, 1e-9));
  }
}

TEST_CASE("frame bounds of a degenerate pair", "[frame_core]") {
  const VectorSystem vs(2, {1.0, 0.0, 2.0, 0.0});
  const auto [lo, hi] = frame_bounds(vs);
  CHECK_THAT(lo, WithinAbs(0.0, 1e-12));
  CHECK_THAT(hi, WithinAbs(5.0, 1e-12));
  CHECK_FALSE(spans_space(vs));
  CHECK(spans_space(tsup::mercedes()));
}

TEST_CASE("tightness defect closed forms", "[frame_core]") {
  // Two copies of e1: A = diag(2, 0), tight constant 1, defect ||diag(1,-1)|| = sqrt(2).
  const VectorSystem doubled(2, {1.0, 0.0, 1.0, 0.0});
  CHECK_THAT(tightness_defect(doubled), WithinRel(std::sqrt(2.0), 1e-12));
  CHECK(tightness_defect(tsup::square_frame()) == 0.0);
  CHECK_THAT(tightness_defect(tsup::mercedes()), WithinAbs(0.0, 1e-12));

  const VectorSystem zero(2, {0.0, 0.0, 0.0, 0.0});
  CHECK_THROWS_AS(tightness_defect(zero), std::domain_error);
}

TEST_CASE("row energies equal quadratic form of the frame operator", "[frame_core]") {
  SplitMix64 gen(77);
  for (int trial = 0; trial < 20; ++trial) {
    const auto vs = random_system(3, 6, NormConstraints(0.5, 2.0, 0.0), gen);
    const auto op = frame_operator(vs);
    for (int k = 0; k < vs.count(); ++k) {
      const auto vk = vs.vec(k);
      double quad = 0.0;
      for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) quad += vk[static_cast<std::size_t>(r)] * op.entries.at(r, c) * vk[static_cast<std::size_t>(c)];
      CHECK_THAT(row_energy(vs, k), WithinRel(quad, 1e-10));
    }
  }
}
